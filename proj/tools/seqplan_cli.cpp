// seqplan: command-line front end for multi-robot task sequencing.
//
//   seqplan run      --scenario grid2.scn --method optimize --seed 7 --out runs/grid2
//   seqplan compare  --scenario grid2.scn --scenario binpick2.scn --seeds 10
//   seqplan validate --scenario grid2.scn [--sequence seq.json] [--report runs/grid2/report.json]

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seqplan/seqplan.hpp"

namespace fs = std::filesystem;
using namespace seqplan;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kValidation = 2, kInfeasible = 3 };

struct SearchFlags {
  std::uint64_t seed = 0;
  int max_outer = 10;
  int max_inner = 20;
  double time_budget = 0.0;
  bool no_prune = false;
  bool no_cache = false;
  int workers = 1;

  void add_to(CLI::App* app) {
    app->add_option("--seed", seed, "Base random seed");
    app->add_option("--max-outer", max_outer, "Random restarts")->check(CLI::PositiveNumber);
    app->add_option("--max-inner", max_inner, "Neighbours tried per restart")->check(CLI::NonNegativeNumber);
    app->add_option("--time-budget", time_budget, "Wall-clock budget in seconds (0 = none)")
        ->check(CLI::NonNegativeNumber);
    app->add_flag("--no-prune", no_prune, "Disable lower-bound early stopping");
    app->add_flag("--no-cache", no_cache, "Disable the prefix cache");
    app->add_option("--workers", workers, "Parallel restarts")->check(CLI::PositiveNumber);
  }

  OptimizerConfig config(std::uint64_t seed_override) const {
    OptimizerConfig cfg;
    cfg.seed = seed_override;
    cfg.max_outer_iter = max_outer;
    cfg.max_inner_iter = max_inner;
    if (time_budget > 0.0) cfg.time_budget = time_budget;
    cfg.prune_with_lower_bound = !no_prune;
    cfg.use_cache = !no_cache;
    cfg.workers = workers;
    return cfg;
  }
};

std::string scenario_label(const Scenario& s, const std::string& path) {
  return s.name.empty() ? fs::path(path).stem().string() : s.name;
}

struct Outcome {
  SerializedSequence sequence;
  PlanResult plan;
  SearchTrace trace;
};

Outcome run_method(const Scenario& scenario, const std::string& method, int robot, const OptimizerConfig& cfg) {
  if (method == "optimize") {
    auto res = optimize(scenario, cfg);
    return {std::move(res.best_sequence), std::move(res.best), std::move(res.trace)};
  }
  EvaluatorOptions eval;
  eval.seed = cfg.seed;
  auto res = run_baseline(scenario, method == "greedy" ? BaselineKind::Greedy : BaselineKind::Single, robot, eval);
  return {std::move(res.sequence), std::move(res.plan), std::move(res.trace)};
}

int cmd_run(const std::string& scenario_path, const std::string& method, int robot, const SearchFlags& flags,
            const std::string& out_dir) {
  const Scenario scenario = load_scenario(scenario_path);
  const OptimizerConfig cfg = flags.config(flags.seed);
  const auto start = std::chrono::steady_clock::now();
  Outcome outcome = run_method(scenario, method, robot, cfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  RunReport report;
  report.scenario = scenario_label(scenario, scenario_path);
  report.method = method;
  report.config = {{"seed", flags.seed},
                   {"max_outer", flags.max_outer},
                   {"max_inner", flags.max_inner},
                   {"time_budget", flags.time_budget},
                   {"prune", !flags.no_prune},
                   {"cache", !flags.no_cache},
                   {"workers", flags.workers}};
  if (method == "single") report.config["robot"] = robot;
  report.sequence = std::move(outcome.sequence);
  report.plan = std::move(outcome.plan);
  report.trace = std::move(outcome.trace);
  report.wall_seconds = wall;

  if (auto problems = check_plan(scenario, report.sequence, report.plan); !problems.empty()) {
    std::cerr << "internal error: produced plan fails the conflict check: " << problems.front() << "\n";
    return kInfeasible;
  }

  fs::create_directories(out_dir);
  write_file((fs::path(out_dir) / "report.json").string(), report_to_json(report).dump(2) + "\n");
  write_file((fs::path(out_dir) / "trace.csv").string(), trace_to_csv(report.trace));
  std::cout << report.scenario << " " << method << ": makespan " << report.plan.makespan << " ("
            << std::fixed << std::setprecision(2) << wall << " s)\n"
            << "sequence: " << to_string(report.sequence) << "\n";
  return kOk;
}

double median(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int cmd_compare(const std::vector<std::string>& scenarios, int seeds, const SearchFlags& flags,
                const std::string& out_dir) {
  std::ostringstream csv;
  csv << "scenario,greedy,single_best,single_robot,optimize_median,ratio_vs_greedy,ratio_vs_single\n";
  std::cout << std::left << std::setw(14) << "scenario" << std::right << std::setw(8) << "greedy" << std::setw(10)
            << "single" << std::setw(10) << "optimize" << std::setw(12) << "opt/greedy" << std::setw(12)
            << "opt/single" << "\n";
  for (const auto& path : scenarios) {
    const Scenario scenario = load_scenario(path);
    const std::string label = scenario_label(scenario, path);
    EvaluatorOptions eval;
    eval.seed = flags.seed;
    const int greedy = run_baseline(scenario, BaselineKind::Greedy, 1, eval).plan.makespan;
    std::optional<int> single;
    int single_robot = 0;
    for (const auto& r : scenario.robots) {
      try {
        const int m = run_baseline(scenario, BaselineKind::Single, r.id, eval).plan.makespan;
        if (!single || m < *single) {
          single = m;
          single_robot = r.id;
        }
      } catch (const InfeasibleError&) {
      }
    }
    std::vector<int> optimized;
    for (int k = 0; k < seeds; ++k)
      optimized.push_back(optimize(scenario, flags.config(flags.seed + k)).best.makespan);
    const double med = median(optimized);
    const double vs_greedy = med / greedy;
    std::cout << std::left << std::setw(14) << label << std::right << std::setw(8) << greedy << std::setw(10)
              << (single ? std::to_string(*single) : "n/a") << std::setw(10) << std::fixed << std::setprecision(1)
              << med << std::setw(12) << std::setprecision(3) << vs_greedy << std::setw(12);
    if (single)
      std::cout << med / *single;
    else
      std::cout << "n/a";
    std::cout << "\n";
    csv << label << ',' << greedy << ',' << (single ? std::to_string(*single) : "") << ','
        << (single ? std::to_string(single_robot) : "") << ',' << med << ',' << vs_greedy << ','
        << (single ? std::to_string(med / *single) : "") << '\n';
  }
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file((fs::path(out_dir) / "compare.csv").string(), csv.str());
  }
  return kOk;
}

int cmd_validate(const std::string& scenario_path, const std::string& sequence_path, const std::string& report_path) {
  const Scenario scenario = load_scenario(scenario_path);
  std::cout << "scenario ok: " << scenario.robot_count() << " robots, " << scenario.task_count() << " tasks\n";
  int status = kOk;
  if (!sequence_path.empty()) {
    SerializedSequence seq;
    try {
      seq = sequence_from_json(nlohmann::json::parse(read_file(sequence_path)));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(sequence_path + ": " + e.what());
    }
    if (auto bad = validate_sequence(seq, scenario)) {
      std::cout << "sequence invalid: " << *bad << "\n";
      status = kValidation;
    } else {
      std::cout << "sequence ok\n";
    }
  }
  if (!report_path.empty()) {
    const RunReport report = parse_report(read_file(report_path));
    auto problems = check_plan(scenario, report.sequence, report.plan);
    if (auto bad = validate_sequence(report.sequence, scenario)) problems.insert(problems.begin(), "sequence: " + *bad);
    if (problems.empty()) {
      std::cout << "report ok: makespan " << report.plan.makespan << ", no conflicts\n";
    } else {
      for (const auto& p : problems) std::cout << "conflict: " << p << "\n";
      status = kValidation;
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Makespan-minimising task sequencing for multiple robots"};
  app.require_subcommand(1);

  std::string scenario_path, method = "optimize", out_dir = "out";
  int robot = 1;
  SearchFlags run_flags;
  auto* run = app.add_subcommand("run", "Plan one scenario with one method");
  run->add_option("--scenario", scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--method", method, "optimize | greedy | single")
      ->check(CLI::IsMember({"optimize", "greedy", "single"}));
  run->add_option("--robot", robot, "Robot id for --method single")->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "Output directory");
  run_flags.add_to(run);

  std::vector<std::string> compare_paths;
  int seeds = 10;
  std::string compare_out;
  SearchFlags compare_flags;
  auto* compare = app.add_subcommand("compare", "Compare optimize against the greedy and single-robot baselines");
  compare->add_option("--scenario", compare_paths, "Scenario files")->required()->check(CLI::ExistingFile);
  compare->add_option("--seeds", seeds, "Seeds per scenario (seed, seed+1, ...)")->check(CLI::PositiveNumber);
  compare->add_option("--out", compare_out, "Directory for compare.csv");
  compare_flags.add_to(compare);

  std::string validate_scenario_path, sequence_path, report_path;
  auto* validate = app.add_subcommand("validate", "Validate a scenario, a sequence, or a saved run report");
  validate->add_option("--scenario", validate_scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);
  validate->add_option("--sequence", sequence_path, "Sequence file [[task, robot], ...]")->check(CLI::ExistingFile);
  validate->add_option("--report", report_path, "report.json from a previous run")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(scenario_path, method, robot, run_flags, out_dir);
    if (*compare) return cmd_compare(compare_paths, seeds, compare_flags, compare_out);
    if (*validate) return cmd_validate(validate_scenario_path, sequence_path, report_path);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kValidation;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
