#pragma once

#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seqplan/optimizer.hpp"
#include "seqplan/scenario_io.hpp"

namespace seqplan {

// Output of one CLI run. Serialized as JSON, the same dialect as scenario files.
struct RunReport {
  std::string scenario;
  std::string method;     // optimize | greedy | single
  nlohmann::json config;  // echo of the run settings
  SerializedSequence sequence;
  PlanResult plan;
  double wall_seconds = 0.0;
  SearchTrace trace;

  friend bool operator==(const RunReport& a, const RunReport& b) {
    return a.scenario == b.scenario && a.method == b.method && a.config == b.config && a.sequence == b.sequence &&
           a.plan == b.plan && a.wall_seconds == b.wall_seconds && a.trace.samples == b.trace.samples;
  }
};

inline nlohmann::json report_to_json(const RunReport& r) {
  using nlohmann::json;
  json trajectories = json::array();
  for (std::size_t i = 0; i < r.plan.paths.size(); ++i) {
    json cells = json::array();
    for (Cell c : r.plan.paths[i]) cells.push_back(io::cell_json(c));
    trajectories.push_back({{"robot", static_cast<int>(i) + 1}, {"start_time", 0}, {"cells", cells}});
  }
  json trace = json::array();
  for (const auto& s : r.trace.samples)
    trace.push_back({{"wall_s", s.wall_seconds},
                     {"candidate_makespan", s.candidate_makespan},
                     {"best_makespan", s.best_makespan},
                     {"outer", s.outer},
                     {"inner", s.inner}});
  return {{"scenario", r.scenario},
          {"method", r.method},
          {"config", r.config},
          {"makespan", r.plan.makespan},
          {"wall_s", r.wall_seconds},
          {"sequence", sequence_to_json(r.sequence)},
          {"finish_times", r.plan.finish_times},
          {"trajectories", trajectories},
          {"trace", trace}};
}

inline RunReport report_from_json(const nlohmann::json& doc) {
  using io::as_array;
  using io::as_int;
  using io::field;
  RunReport r;
  const auto& scen = field(doc, "scenario", "report");
  const auto& method = field(doc, "method", "report");
  if (!scen.is_string() || !method.is_string()) throw ParseError("report: scenario and method must be strings");
  r.scenario = scen.get<std::string>();
  r.method = method.get<std::string>();
  r.config = doc.value("config", nlohmann::json::object());
  r.plan.makespan = as_int(field(doc, "makespan", "report"), "report.makespan");
  const auto& wall = field(doc, "wall_s", "report");
  if (!wall.is_number()) throw ParseError("report.wall_s: expected a number");
  r.wall_seconds = wall.get<double>();
  r.sequence = sequence_from_json(field(doc, "sequence", "report"));
  const auto& finish = as_array(field(doc, "finish_times", "report"), "report.finish_times");
  for (std::size_t i = 0; i < finish.size(); ++i)
    r.plan.finish_times.push_back(as_int(finish[i], "report.finish_times[" + std::to_string(i) + "]"));
  const auto& trajs = as_array(field(doc, "trajectories", "report"), "report.trajectories");
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    const std::string p = "report.trajectories[" + std::to_string(i) + "]";
    if (as_int(field(trajs[i], "robot", p), p + ".robot") != static_cast<int>(i) + 1)
      throw ParseError(p + ": trajectories must be listed in robot order");
    if (as_int(field(trajs[i], "start_time", p), p + ".start_time") != 0)
      throw ParseError(p + ": trajectories must start at t=0");
    std::vector<Cell> cells;
    const auto& jc = as_array(field(trajs[i], "cells", p), p + ".cells");
    for (std::size_t k = 0; k < jc.size(); ++k) cells.push_back(io::as_cell(jc[k], p + ".cells"));
    r.plan.paths.push_back(std::move(cells));
  }
  const auto& trace = as_array(field(doc, "trace", "report"), "report.trace");
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const std::string p = "report.trace[" + std::to_string(i) + "]";
    const auto& row = trace[i];
    TraceSample s;
    const auto& ws = field(row, "wall_s", p);
    if (!ws.is_number()) throw ParseError(p + ".wall_s: expected a number");
    s.wall_seconds = ws.get<double>();
    s.candidate_makespan = as_int(field(row, "candidate_makespan", p), p);
    s.best_makespan = as_int(field(row, "best_makespan", p), p);
    s.outer = as_int(field(row, "outer", p), p);
    s.inner = as_int(field(row, "inner", p), p);
    r.trace.samples.push_back(s);
  }
  return r;
}

inline RunReport parse_report(const std::string& text) {
  try {
    return report_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("report syntax error: ") + e.what());
  }
}

// Header: wall_s,candidate_makespan,best_makespan,outer,inner
inline std::string trace_to_csv(const SearchTrace& trace) {
  std::ostringstream out;
  out << "wall_s,candidate_makespan,best_makespan,outer,inner\n";
  for (const auto& s : trace.samples)
    out << s.wall_seconds << ',' << s.candidate_makespan << ',' << s.best_makespan << ',' << s.outer << ','
        << s.inner << '\n';
  return out.str();
}

}  // namespace seqplan
