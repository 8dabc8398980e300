#pragma once

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <random>
#include <vector>

#include "seqplan/obstacle_field.hpp"
#include "seqplan/scenario.hpp"

namespace seqplan {

// Optimistic travel time: Chebyshev distance covered at full speed.
inline int straight_line_lower_bound(Cell from, Cell to, int max_speed) {
  return (chebyshev(from, to) + max_speed - 1) / max_speed;
}

struct PlanQuery {
  int robot_id = 1;
  Cell start_cell;
  int earliest_start = 0;
  Cell goal_cell;
  int min_finish = 0;  // precedence lower bound on the finish time
  int dwell = 0;       // steps the goal is held after arrival
};

struct PlannedPath {
  Trajectory trajectory;  // from (start_cell, earliest_start) to (goal_cell, finish), hold included
  int arrival = 0;
  int finish = 0;
};

// Beyond this timestep the search gives up. Other robots are static after
// their last event, so the bound keeps the search complete on static maps.
inline int search_horizon(const ObstacleField& field, const Workspace& ws, int robot_id, int earliest_start,
                          int min_finish, int dwell) {
  const int speed = field.agent(robot_id).max_speed;
  const int travel = ((ws.width() + ws.height()) * 4 + speed - 1) / speed;
  return std::max({field.last_event_time(robot_id), min_finish, earliest_start}) + dwell + travel;
}

namespace detail {

struct SearchSpec {
  int robot_id = 1;
  Cell start;
  int t0 = 0;
  Cell goal;
  int min_arrival = 0;
  int dwell = 0;
  bool hold_forever = false;
  int horizon = 0;
};

// Space-time A* over (cell, timestep). Every edge costs one timestep, so the
// cost of a state is fixed by its time and a closed set on (cell, t) is exact.
inline std::optional<PlannedPath> space_time_astar(const SearchSpec& spec, const ObstacleField& field,
                                                   const Workspace& ws) {
  const auto& agent = field.agent(spec.robot_id);
  const int speed = agent.max_speed;
  const int radius = agent.radius;
  const int cells = ws.cell_count();

  std::vector<std::uint8_t> free_map(cells);
  for (int i = 0; i < cells; ++i) free_map[i] = ws.footprint_free(ws.cell_at(i), radius) ? 1 : 0;

  if (!ws.in_bounds(spec.start) || !free_map[ws.index(spec.start)] ||
      field.collides(spec.robot_id, spec.start, spec.t0))
    return std::nullopt;
  if (!ws.in_bounds(spec.goal) || !free_map[ws.index(spec.goal)]) return std::nullopt;

  const int settle = field.last_event_time(spec.robot_id);
  auto holds = [&](int arrival) {
    const int until = spec.hold_forever ? std::max(settle, arrival) : arrival + spec.dwell;
    for (int t = arrival + 1; t <= until; ++t)
      if (field.collides(spec.robot_id, spec.goal, t)) return false;
    return true;
  };

  const int layers = spec.horizon - spec.t0 + 1;
  if (layers <= 0) return std::nullopt;
  auto state = [&](Cell c, int t) { return static_cast<std::size_t>(t - spec.t0) * cells + ws.index(c); };

  struct Node {
    Cell cell;
    int t;
    int parent;
  };
  struct Entry {
    int f;
    int waits;
    int x;
    int y;
    int t;
    int node;
    // Lowest f first, then fewer waits, then lexicographic (x, y).
    bool operator>(const Entry& o) const {
      if (f != o.f) return f > o.f;
      if (waits != o.waits) return waits > o.waits;
      if (x != o.x) return x > o.x;
      if (y != o.y) return y > o.y;
      return t < o.t;
    }
  };

  std::vector<Node> nodes;
  std::vector<std::uint8_t> closed(static_cast<std::size_t>(layers) * cells, 0);
  std::vector<int> best_waits(static_cast<std::size_t>(layers) * cells, INT_MAX);
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

  auto priority = [&](Cell c, int t) {
    return std::max(t + straight_line_lower_bound(c, spec.goal, speed), spec.min_arrival) + spec.dwell;
  };

  nodes.push_back({spec.start, spec.t0, -1});
  best_waits[state(spec.start, spec.t0)] = 0;
  open.push({priority(spec.start, spec.t0), 0, spec.start.x, spec.start.y, spec.t0, 0});

  while (!open.empty()) {
    const Entry top = open.top();
    open.pop();
    const Node node = nodes[top.node];
    const std::size_t sid = state(node.cell, node.t);
    if (closed[sid]) continue;
    closed[sid] = 1;

    if (node.cell == spec.goal && node.t >= spec.min_arrival && holds(node.t)) {
      PlannedPath out;
      out.arrival = node.t;
      out.finish = node.t + spec.dwell;
      out.trajectory.robot_id = spec.robot_id;
      out.trajectory.start_time = spec.t0;
      for (int n = top.node; n >= 0; n = nodes[n].parent) out.trajectory.cells.push_back(nodes[n].cell);
      std::reverse(out.trajectory.cells.begin(), out.trajectory.cells.end());
      out.trajectory.cells.insert(out.trajectory.cells.end(), spec.dwell, spec.goal);
      return out;
    }
    if (node.t >= spec.horizon) continue;

    const int nt = node.t + 1;
    for (int dy = -speed; dy <= speed; ++dy) {
      for (int dx = -speed; dx <= speed; ++dx) {
        const Cell next{node.cell.x + dx, node.cell.y + dy};
        if (!ws.in_bounds(next) || !free_map[ws.index(next)]) continue;
        const std::size_t nid = state(next, nt);
        if (closed[nid]) continue;
        const int waits = top.waits + (next == node.cell ? 1 : 0);
        if (waits >= best_waits[nid]) continue;
        if (field.collides(spec.robot_id, next, nt)) continue;
        if (field.swap_conflict(spec.robot_id, node.cell, next, node.t)) continue;
        best_waits[nid] = waits;
        nodes.push_back({next, nt, top.node});
        open.push({priority(next, nt), waits, next.x, next.y, nt, static_cast<int>(nodes.size()) - 1});
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Earliest-finishing collision-free path for one robot to one goal, treating
// every other robot's timeline in `obstacles` as a moving obstacle.
// nullopt when the start is in collision or no path exists within the horizon.
inline std::optional<PlannedPath> plan_path(const PlanQuery& query, const ObstacleField& obstacles,
                                            const Workspace& workspace) {
  const int min_finish = std::max(query.min_finish, query.earliest_start);
  detail::SearchSpec spec;
  spec.robot_id = query.robot_id;
  spec.start = query.start_cell;
  spec.t0 = query.earliest_start;
  spec.goal = query.goal_cell;
  spec.dwell = query.dwell;
  spec.min_arrival = std::max(query.earliest_start, min_finish - query.dwell);
  spec.horizon = search_horizon(obstacles, workspace, query.robot_id, query.earliest_start, min_finish, query.dwell);
  return detail::space_time_astar(spec, obstacles, workspace);
}

// Earliest path back to the robot's resting cell after which it can stay there
// indefinitely.
inline std::optional<Trajectory> plan_escape(int robot_id, Cell from_cell, int from_time,
                                             const ObstacleField& obstacles, const Workspace& workspace) {
  detail::SearchSpec spec;
  spec.robot_id = robot_id;
  spec.start = from_cell;
  spec.t0 = from_time;
  spec.goal = obstacles.agent(robot_id).resting;
  spec.min_arrival = from_time;
  spec.hold_forever = true;
  spec.horizon = search_horizon(obstacles, workspace, robot_id, from_time, from_time, 0);
  auto found = detail::space_time_astar(spec, obstacles, workspace);
  if (!found) return std::nullopt;
  return std::move(found->trajectory);
}

// Randomised shortcutting: replace a sub-trajectory between two sampled
// indices by a straight interpolation over the same time window. A candidate
// is kept only if it is collision-free and strictly shorter. Endpoints and
// timing never change.
inline Trajectory shortcut(const Trajectory& trajectory, const ObstacleField& obstacles,
                           const Workspace& workspace, std::uint64_t seed, int attempts = 100) {
  Trajectory out = trajectory;
  const int n = static_cast<int>(out.cells.size());
  if (n < 3) return out;
  const auto& agent = obstacles.agent(out.robot_id);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::vector<Cell> segment;

  auto seg_length = [](const std::vector<Cell>& cells, int from, int to) {
    double d = 0.0;
    for (int k = from + 1; k <= to; ++k)
      d += std::hypot(cells[k].x - cells[k - 1].x, cells[k].y - cells[k - 1].y);
    return d;
  };

  for (int attempt = 0; attempt < attempts; ++attempt) {
    int i = pick(rng);
    int j = pick(rng);
    if (i > j) std::swap(i, j);
    if (j - i < 2) continue;

    const Cell a = out.cells[i];
    const Cell b = out.cells[j];
    segment.assign(out.cells.begin(), out.cells.end());
    bool ok = true;
    for (int k = i + 1; k < j && ok; ++k) {
      const double frac = static_cast<double>(k - i) / (j - i);
      const Cell c{static_cast<int>(std::lround(a.x + (b.x - a.x) * frac)),
                   static_cast<int>(std::lround(a.y + (b.y - a.y) * frac))};
      segment[k] = c;
      ok = workspace.footprint_free(c, agent.radius) &&
           !obstacles.collides(out.robot_id, c, out.start_time + k);
    }
    if (!ok) continue;
    for (int k = i + 1; k <= j && ok; ++k) {
      ok = chebyshev(segment[k - 1], segment[k]) <= agent.max_speed &&
           !obstacles.swap_conflict(out.robot_id, segment[k - 1], segment[k], out.start_time + k - 1);
    }
    if (!ok) continue;
    if (seg_length(segment, i, j) + 1e-9 < seg_length(out.cells, i, j)) out.cells.swap(segment);
  }
  return out;
}

}  // namespace seqplan
