#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "oracle/bfs_oracle.hpp"
#include "seqplan/seqplan.hpp"

namespace support {

using namespace seqplan;

inline const std::vector<std::string>& bundled_names() {
  static const std::vector<std::string> names{"grid2", "grid4", "lis_small", "lis_large", "binpick2"};
  return names;
}

inline std::string scenario_path(const std::string& name) {
  return std::string(SEQPLAN_SCENARIO_DIR) + "/" + name + ".scn";
}

inline Scenario bundled(const std::string& name) { return load_scenario(scenario_path(name)); }

inline RobotSpec robot(int id, Cell start, int radius = 0, int speed = 1) {
  return RobotSpec{id, start, start, radius, speed};
}

inline TaskSpec go_to(int id, Cell goal, std::vector<int> capable, int dwell = 0) {
  return TaskSpec{id, GoToPose{goal}, std::move(capable), dwell};
}

inline TaskSpec pick_place(int id, Cell pick, Cell place, std::vector<int> capable, int dwell = 0) {
  return TaskSpec{id, PickPlace{pick, place}, std::move(capable), dwell};
}

inline Scenario make_scenario(int w, int h, std::vector<Cell> obstacles, std::vector<RobotSpec> robots,
                              std::vector<TaskSpec> tasks, std::vector<PrecedenceEdge> prec = {}) {
  Scenario s;
  s.name = "test";
  s.workspace = Workspace(w, h, std::move(obstacles));
  s.robots = std::move(robots);
  s.tasks = std::move(tasks);
  s.precedence = PrecedenceDag(std::move(prec));
  validate_scenario(s);
  return s;
}

inline SerializedSequence seq_of(std::vector<SequenceEntry> e) { return SerializedSequence(std::move(e)); }

// Bridge from library state to the oracle's plain data.
inline oracle::Grid grid_of(const Workspace& ws) { return {ws.width(), ws.height(), ws.obstacles()}; }

inline std::vector<oracle::Mover> movers_except(const ObstacleField& field, int robot_id) {
  std::vector<oracle::Mover> out;
  for (int r = 1; r <= field.robot_count(); ++r)
    if (r != robot_id) out.push_back({field.agent(r).radius, field.timeline(r)});
  return out;
}

// A random single-robot query on a small grid with up to two moving
// obstacles. Robot 1 plans; robots 2.. replay random walks.
struct RandomQuery {
  Scenario scenario;
  ObstacleField field;
  PlanQuery query;
  bool escape = false;
  oracle::Grid grid;
  std::vector<oracle::Mover> movers;
  oracle::Query oq;
  int expected = 0;  // oracle finish
};

inline std::optional<RandomQuery> try_random_query(std::mt19937_64& rng, int horizon = 60) {
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int w = uni(3, 8), h = uni(3, 8);
  std::vector<Cell> obstacles;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (uni(0, 99) < 12) obstacles.push_back({x, y});
  oracle::Grid grid{w, h, obstacles};

  const int radius = uni(0, 3) == 0 ? 1 : 0;
  const int speed = uni(1, 2);
  auto random_free = [&](int r) -> std::optional<Cell> {
    for (int k = 0; k < 50; ++k) {
      Cell c{uni(0, w - 1), uni(0, h - 1)};
      if (oracle::clear_of_obstacles(grid, c, r)) return c;
    }
    return std::nullopt;
  };

  std::vector<oracle::Mover> movers;
  const int mover_count = uni(0, 2);
  for (int m = 0; m < mover_count; ++m) {
    oracle::Mover mv;
    mv.radius = uni(0, 4) == 0 ? 1 : 0;
    auto c = random_free(mv.radius);
    if (!c) return std::nullopt;
    mv.cells.push_back(*c);
    const int len = uni(0, 25);
    for (int k = 0; k < len; ++k) {
      Cell cur = mv.cells.back();
      Cell next{cur.x + uni(-1, 1), cur.y + uni(-1, 1)};
      mv.cells.push_back(oracle::clear_of_obstacles(grid, next, mv.radius) ? next : cur);
    }
    movers.push_back(std::move(mv));
  }

  auto start = random_free(radius);
  auto goal = random_free(radius);
  if (!start || !goal) return std::nullopt;
  RandomQuery out;
  out.escape = uni(0, 3) == 0;
  const int t0 = uni(0, 6);
  if (oracle::hits_mover(movers, *start, radius, t0)) return std::nullopt;

  out.oq = {*start, t0, *goal, out.escape ? t0 : uni(0, 20), out.escape ? 0 : uni(0, 3), out.escape, radius, speed,
            horizon};
  auto finish = oracle::earliest_finish(grid, movers, out.oq);
  if (!finish) return std::nullopt;
  out.expected = *finish;

  // Same situation expressed with library types.
  std::vector<RobotSpec> robots{{1, *start, out.escape ? *goal : *start, radius, speed}};
  for (std::size_t m = 0; m < movers.size(); ++m)
    robots.push_back({static_cast<int>(m) + 2, movers[m].cells.front(), movers[m].cells.front(), movers[m].radius, 1});
  out.scenario.workspace = Workspace(w, h, obstacles);
  out.scenario.robots = robots;
  out.field = ObstacleField(out.scenario);
  for (std::size_t m = 0; m < movers.size(); ++m)
    out.field.commit(Trajectory{static_cast<int>(m) + 2, 0, movers[m].cells});
  out.query = {1, *start, t0, *goal, out.oq.min_finish, out.oq.dwell};
  out.grid = std::move(grid);
  out.movers = std::move(movers);
  return out;
}

inline RandomQuery random_query(std::mt19937_64& rng, int horizon = 60) {
  for (;;)
    if (auto q = try_random_query(rng, horizon)) return std::move(*q);
}

// Runs the library on a random query; returns the finish time and the timed
// cells it produced.
struct Answer {
  std::optional<int> finish;
  Trajectory trajectory;
};

inline Answer answer(const RandomQuery& q) {
  Answer a;
  if (q.escape) {
    auto traj = plan_escape(1, q.query.start_cell, q.query.earliest_start, q.field, q.scenario.workspace);
    if (traj) {
      a.finish = traj->end_time();
      a.trajectory = *traj;
    }
  } else if (auto p = plan_path(q.query, q.field, q.scenario.workspace)) {
    a.finish = p->finish;
    a.trajectory = p->trajectory;
  }
  return a;
}

// Small random instance: a few scattered obstacles, robots with radius 0 or
// 1 resting where they start, random capability sets and a sparse forward
// precedence graph.
inline Scenario random_scenario(std::mt19937_64& rng, int task_count = 6, int robot_count = 2) {
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (;;) {
    const int w = uni(8, 12), h = uni(6, 10);
    std::vector<Cell> obstacles;
    for (int k = uni(0, 6); k > 0; --k) obstacles.push_back({uni(0, w - 1), uni(0, h - 1)});
    Workspace ws(w, h, obstacles);
    std::vector<RobotSpec> robots;
    for (int r = 1; r <= robot_count; ++r) {
      const Cell c{uni(0, w - 1), uni(0, h - 1)};
      robots.push_back({r, c, c, uni(0, 2) == 0 ? 1 : 0, uni(0, 3) == 0 ? 2 : 1});
    }
    std::vector<TaskSpec> tasks;
    for (int t = 1; t <= task_count; ++t) {
      std::vector<int> capable;
      for (int r = 1; r <= robot_count; ++r)
        if (uni(0, 3) > 0) capable.push_back(r);
      if (capable.empty()) capable.push_back(uni(1, robot_count));
      const Cell a{uni(0, w - 1), uni(0, h - 1)};
      const Cell b{uni(0, w - 1), uni(0, h - 1)};
      const int dwell = uni(0, 2);
      tasks.push_back(uni(0, 2) == 0 ? pick_place(t, a, b, capable, dwell) : go_to(t, a, capable, dwell));
    }
    std::vector<PrecedenceEdge> prec;
    for (int k = uni(0, 2); k > 0; --k) {
      const int a = uni(1, task_count), b = uni(1, task_count);
      if (a < b) prec.push_back({a, b});
    }
    try {
      return make_scenario(w, h, obstacles, robots, tasks, prec);
    } catch (const ValidationError&) {
    }
  }
}

// Random valid sequence for a scenario.
inline SerializedSequence random_sequence(const Scenario& s, std::uint64_t seed) {
  SeededRng rng(seed);
  SerializedSequence seq = initialize_sequence(s, rng);
  const int moves = static_cast<int>(rng.index(8));
  for (int k = 0; k < moves; ++k) seq = generate_neighbor(seq, s, rng);
  return seq;
}

}  // namespace support
