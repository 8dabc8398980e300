#pragma once

#include <cstdlib>
#include <string>
#include <vector>

#include "seqplan/scenario.hpp"
#include "seqplan/sequence.hpp"
#include "seqplan/sequence_evaluator.hpp"

namespace seqplan {

// Whole-plan verification, written independently of the planner's own
// collision code: it only looks at the per-robot paths and finish times.
// Returns one message per problem found; empty means the plan is valid.
inline std::vector<std::string> check_plan(const Scenario& scenario, const SerializedSequence& seq,
                                           const PlanResult& plan) {
  std::vector<std::string> problems;
  auto report = [&](std::string msg) { problems.push_back(std::move(msg)); };
  const int robots = scenario.robot_count();
  if (static_cast<int>(plan.paths.size()) != robots) {
    report("expected " + std::to_string(robots) + " paths, got " + std::to_string(plan.paths.size()));
    return problems;
  }

  std::size_t horizon = 1;
  for (int r = 0; r < robots; ++r) {
    const auto& path = plan.paths[r];
    const auto& spec = scenario.robots[r];
    const std::string tag = "robot " + std::to_string(spec.id);
    if (path.empty()) {
      report(tag + ": empty path");
      return problems;
    }
    horizon = std::max(horizon, path.size());
    if (path.front() != spec.start) report(tag + ": does not start at its start cell");
    for (std::size_t t = 0; t < path.size(); ++t) {
      const Cell c = path[t];
      if (c.x < 0 || c.y < 0 || c.x >= scenario.workspace.width() || c.y >= scenario.workspace.height()) {
        report(tag + ": out of bounds at t=" + std::to_string(t));
        continue;
      }
      for (const Cell o : scenario.workspace.obstacles())
        if (std::abs(o.x - c.x) <= spec.radius && std::abs(o.y - c.y) <= spec.radius)
          report(tag + ": hits obstacle at t=" + std::to_string(t));
      if (t > 0) {
        const int dx = std::abs(c.x - path[t - 1].x);
        const int dy = std::abs(c.y - path[t - 1].y);
        if (dx > spec.max_speed || dy > spec.max_speed) report(tag + ": exceeds max speed at t=" + std::to_string(t));
      }
    }
  }

  auto at = [&](int r, std::size_t t) { return t < plan.paths[r].size() ? plan.paths[r][t] : plan.paths[r].back(); };
  for (std::size_t t = 0; t < horizon; ++t) {
    for (int a = 0; a < robots; ++a) {
      for (int b = a + 1; b < robots; ++b) {
        const Cell pa = at(a, t);
        const Cell pb = at(b, t);
        const int reach = scenario.robots[a].radius + scenario.robots[b].radius;
        if (std::abs(pa.x - pb.x) <= reach && std::abs(pa.y - pb.y) <= reach)
          report("robots " + std::to_string(a + 1) + " and " + std::to_string(b + 1) + " collide at t=" +
                 std::to_string(t));
        if (t + 1 < horizon) {
          const Cell na = at(a, t + 1);
          const Cell nb = at(b, t + 1);
          if (pa != na && pa == nb && na == pb)
            report("robots " + std::to_string(a + 1) + " and " + std::to_string(b + 1) + " swap cells at t=" +
                   std::to_string(t));
        }
      }
    }
  }

  if (plan.finish_times.size() != seq.size()) {
    report("finish time count does not match the sequence length");
    return problems;
  }
  int latest = 0;
  for (std::size_t j = 0; j < seq.size(); ++j) {
    if (j > 0 && plan.finish_times[j] <= plan.finish_times[j - 1])
      report("finish times not strictly increasing at entry " + std::to_string(j));
    latest = std::max(latest, plan.finish_times[j]);
  }
  if (!seq.empty() && plan.makespan != latest) report("makespan is not the latest finish time");

  // Each task must be held at its action cells for dwell steps, in order,
  // between the robot's previous finish and this entry's finish. Consecutive
  // holds may share their boundary timestep (pick and place on one cell).
  std::vector<int> robot_prev(robots, 0);
  for (std::size_t j = 0; j < seq.size(); ++j) {
    const auto& task = scenario.task(seq[j].task);
    const int r = seq[j].robot - 1;
    const int finish = plan.finish_times[j];
    auto held = [&](Cell c, int end) {
      if (end - task.dwell < 0) return false;
      for (int t = end - task.dwell; t <= end; ++t)
        if (at(r, static_cast<std::size_t>(t)) != c) return false;
      return true;
    };
    const auto cells = task.action_cells();
    int cursor = finish;
    if (!held(cells.back(), cursor)) {
      report("task " + std::to_string(task.id) + " not completed at its finish time");
      continue;
    }
    cursor -= task.dwell;
    for (std::size_t k = cells.size() - 1; k-- > 0;) {
      int found = -1;
      for (int t = cursor; t >= robot_prev[r]; --t)
        if (held(cells[k], t)) {
          found = t;
          break;
        }
      if (found < 0) {
        report("task " + std::to_string(task.id) + " action " + std::to_string(k) + " never completed");
        break;
      }
      cursor = found - task.dwell;
    }
    robot_prev[r] = finish;
  }
  return problems;
}

}  // namespace seqplan
