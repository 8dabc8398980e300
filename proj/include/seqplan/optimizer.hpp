#pragma once

#include <atomic>
#include <chrono>
#include <climits>
#include <cstdint>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "seqplan/rng.hpp"
#include "seqplan/scenario.hpp"
#include "seqplan/sequence.hpp"
#include "seqplan/sequence_evaluator.hpp"
#include "seqplan/sequence_search.hpp"

namespace seqplan {

// No feasible plan could be produced.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Which makespan the lower bound is compared against. Inner keeps the search
// path identical to an unpruned run; Global prunes more aggressively.
enum class PruneIncumbent { Inner, Global };

struct OptimizerConfig {
  int max_outer_iter = 10;
  int max_inner_iter = 20;
  std::uint64_t seed = 0;
  bool prune_with_lower_bound = true;
  PruneIncumbent prune_incumbent = PruneIncumbent::Inner;
  std::optional<double> time_budget;  // seconds; checked between evaluations
  bool use_cache = true;
  std::size_t cache_budget = 10000;
  int workers = 1;
  bool shortcut = true;
  int shortcut_attempts = 100;
  NeighborConfig neighbor;
  std::vector<std::uint64_t> restart_seeds;  // overrides max_outer_iter when non-empty

  void validate() const {
    if (max_outer_iter < 1 && restart_seeds.empty()) throw std::invalid_argument("max_outer_iter must be >= 1");
    if (max_inner_iter < 0) throw std::invalid_argument("max_inner_iter must be >= 0");
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");
    if (time_budget && *time_budget <= 0.0) throw std::invalid_argument("time_budget must be positive");
  }

  std::uint64_t restart_seed(int outer) const {
    return restart_seeds.empty() ? mix_seed(seed, static_cast<std::uint64_t>(outer)) : restart_seeds.at(outer);
  }
  int restart_count() const { return restart_seeds.empty() ? max_outer_iter : static_cast<int>(restart_seeds.size()); }
};

// One row per successfully planned candidate. inner == 0 is the restart's
// initial sequence, inner == i + 1 the i-th neighbour.
struct TraceSample {
  double wall_seconds = 0.0;
  int candidate_makespan = 0;
  int best_makespan = 0;
  int outer = 0;
  int inner = 0;

  friend bool operator==(const TraceSample&, const TraceSample&) = default;
};

struct SearchTrace {
  std::vector<TraceSample> samples;
};

struct RestartSummary {
  std::uint64_t seed = 0;
  std::optional<int> initial_makespan;
  std::optional<int> best_makespan;
  SerializedSequence best_sequence;
  int evaluations = 0;
  int pruned = 0;
  int infeasible = 0;
};

struct OptimizeResult {
  PlanResult best;
  SerializedSequence best_sequence;
  SearchTrace trace;
  std::vector<RestartSummary> restarts;  // indexed by outer iteration
  bool budget_exhausted = false;
};

namespace detail {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Global incumbent shared by all restarts. Ties resolve to the lowest
// (outer, inner) so concurrent runs pick the same winner as a serial one.
class Incumbent {
 public:
  explicit Incumbent(const Stopwatch& clock) : clock_(clock) {}

  void offer(const EvalOutcome& out, const SerializedSequence& seq, int outer, int inner) {
    std::lock_guard lock(mutex_);
    const int t = out.result.makespan;
    const auto key = std::make_tuple(t, outer, inner);
    if (!best_ || key < best_key_) {
      best_ = out.result;
      best_seq_ = seq;
      best_key_ = key;
      makespan_.store(t);
    }
    trace_.samples.push_back({clock_.seconds(), t, makespan_.load(), outer, inner});
  }

  std::optional<int> makespan() const {
    const int t = makespan_.load();
    return t == INT_MAX ? std::nullopt : std::optional<int>(t);
  }

  bool has_best() const { return best_.has_value(); }
  PlanResult take_best() { return std::move(*best_); }
  SerializedSequence best_sequence() const { return best_seq_; }
  SearchTrace take_trace() { return std::move(trace_); }

 private:
  const Stopwatch& clock_;
  std::mutex mutex_;
  std::optional<PlanResult> best_;
  SerializedSequence best_seq_;
  std::tuple<int, int, int> best_key_{INT_MAX, INT_MAX, INT_MAX};
  std::atomic<int> makespan_{INT_MAX};
  SearchTrace trace_;
};

}  // namespace detail

// Greedy descent with random restarts over serialized sequences. Each restart
// draws a round-robin random sequence and keeps replacing it with a random
// neighbour whenever that neighbour has a strictly smaller makespan.
inline OptimizeResult optimize(const Scenario& scenario, const OptimizerConfig& config) {
  config.validate();
  const int restarts = config.restart_count();
  detail::Stopwatch clock;
  detail::Incumbent incumbent(clock);
  std::atomic<bool> out_of_time{false};
  std::atomic<int> next_outer{0};
  std::vector<RestartSummary> summaries(restarts);
  std::mutex error_mutex;
  std::vector<std::string> errors;

  EvaluatorOptions eval_opts;
  eval_opts.seed = config.seed;
  eval_opts.prune = config.prune_with_lower_bound;
  eval_opts.shortcut = config.shortcut;
  eval_opts.shortcut_attempts = config.shortcut_attempts;

  auto budget_left = [&] {
    if (config.time_budget && clock.seconds() >= *config.time_budget) out_of_time = true;
    return !out_of_time.load();
  };

  auto run_restart = [&](int outer, PrefixCache* cache) {
    RestartSummary& summary = summaries[outer];
    summary.seed = config.restart_seed(outer);
    SeededRng rng(summary.seed);
    SerializedSequence seq = initialize_sequence(scenario, rng);

    auto evaluate = [&](const SerializedSequence& cand, std::optional<int> inner_best) {
      std::optional<int> bound =
          config.prune_incumbent == PruneIncumbent::Inner ? inner_best : incumbent.makespan();
      ++summary.evaluations;
      auto out = plan_given_sequence(cand, scenario, bound, cache, eval_opts);
      if (out.status == EvalStatus::Pruned) ++summary.pruned;
      if (out.status == EvalStatus::Infeasible) ++summary.infeasible;
      return out;
    };

    // the very first candidate is always planned so a budgeted run has something to return
    if (!budget_left() && outer > 0) return;
    std::optional<int> inner_best;
    auto first = evaluate(seq, std::nullopt);
    if (first.planned()) {
      inner_best = first.result.makespan;
      summary.initial_makespan = inner_best;
      summary.best_sequence = seq;
      incumbent.offer(first, seq, outer, 0);
    }
    for (int i = 0; i < config.max_inner_iter; ++i) {
      if (!budget_left()) break;
      SerializedSequence cand = generate_neighbor(seq, scenario, rng, config.neighbor);
      auto out = evaluate(cand, inner_best);
      if (!out.planned()) continue;
      const int t = out.result.makespan;
      if (!inner_best || t < *inner_best) {
        inner_best = t;
        seq = cand;
        summary.best_sequence = cand;
      }
      incumbent.offer(out, cand, outer, i + 1);
    }
    summary.best_makespan = inner_best;
  };

  auto worker = [&] {
    std::optional<PrefixCache> cache;
    if (config.use_cache) cache.emplace(config.cache_budget);
    for (int outer = next_outer++; outer < restarts; outer = next_outer++) {
      try {
        run_restart(outer, cache ? &*cache : nullptr);
      } catch (const SequenceError& e) {
        std::lock_guard lock(error_mutex);
        errors.push_back(e.what());
      }
    }
  };

  const int workers = std::min(config.workers, restarts);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  OptimizeResult result;
  result.budget_exhausted = out_of_time.load();
  result.restarts = std::move(summaries);
  if (!incumbent.has_best()) {
    std::string msg = "no feasible sequence found in " + std::to_string(restarts) + " restarts";
    std::set<std::string> unique(errors.begin(), errors.end());
    for (const auto& e : unique) msg += "; " + e;
    throw InfeasibleError(msg);
  }
  result.best_sequence = incumbent.best_sequence();
  result.best = incumbent.take_best();
  result.trace = incumbent.take_trace();
  return result;
}

enum class BaselineKind { Greedy, Single };

struct BaselineResult {
  SerializedSequence sequence;
  PlanResult plan;
  SearchTrace trace;  // a single sample: baselines are not anytime
};

// Plans the greedy-alternating or single-robot sequence once, without pruning.
inline BaselineResult run_baseline(const Scenario& scenario, BaselineKind kind, int robot_id = 1,
                                   const EvaluatorOptions& options = {}) {
  detail::Stopwatch clock;
  BaselineResult out;
  if (kind == BaselineKind::Greedy) {
    try {
      out.sequence = greedy_baseline_sequence(scenario);
    } catch (const SequenceError& e) {
      throw InfeasibleError(std::string("greedy baseline: ") + e.what());
    }
  } else {
    if (robot_id < 1 || robot_id > scenario.robot_count())
      throw std::invalid_argument("unknown robot " + std::to_string(robot_id));
    auto seq = single_robot_sequence(scenario, robot_id);
    if (!seq) throw InfeasibleError("robot " + std::to_string(robot_id) + " cannot do every task");
    out.sequence = std::move(*seq);
  }
  EvaluatorOptions opts = options;
  opts.prune = false;
  auto eval = plan_given_sequence(out.sequence, scenario, std::nullopt, nullptr, opts);
  if (!eval.planned()) throw InfeasibleError("baseline sequence could not be planned: " + eval.reason);
  out.plan = std::move(eval.result);
  out.trace.samples.push_back({clock.seconds(), out.plan.makespan, out.plan.makespan, 0, 0});
  return out;
}

}  // namespace seqplan
