#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace seqplan {

// Grid cell, 0-based (x, y).
struct Cell {
  int x = 0;
  int y = 0;

  friend constexpr bool operator==(const Cell&, const Cell&) = default;
  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

inline int chebyshev(Cell a, Cell b) {
  return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

// Raised when a scenario or sequence breaks one of its structural invariants.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Workspace {
 public:
  Workspace() = default;
  Workspace(int width, int height, std::vector<Cell> obstacles)
      : width_(width), height_(height), obstacles_(std::move(obstacles)) {
    if (width_ < 1 || height_ < 1)
      throw ValidationError("workspace: width and height must be >= 1");
    blocked_.assign(static_cast<std::size_t>(width_) * height_, 0);
    for (const auto& c : obstacles_) {
      if (!in_bounds(c))
        throw ValidationError("workspace: obstacle (" + std::to_string(c.x) + "," +
                              std::to_string(c.y) + ") out of bounds");
      blocked_[index(c)] = 1;
    }
    std::sort(obstacles_.begin(), obstacles_.end());
    obstacles_.erase(std::unique(obstacles_.begin(), obstacles_.end()), obstacles_.end());
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int cell_count() const { return width_ * height_; }
  const std::vector<Cell>& obstacles() const { return obstacles_; }

  bool in_bounds(Cell c) const {
    return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_;
  }
  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.y) * width_ + c.x;
  }
  Cell cell_at(std::size_t idx) const {
    return {static_cast<int>(idx % width_), static_cast<int>(idx / width_)};
  }
  bool is_obstacle(Cell c) const { return blocked_[index(c)] != 0; }

  // A robot centred on `c` occupies the (2r+1)^2 square around it. Footprint
  // cells outside the grid are ignored; those inside must be obstacle-free.
  bool footprint_free(Cell c, int radius) const {
    if (!in_bounds(c)) return false;
    for (int dy = -radius; dy <= radius; ++dy)
      for (int dx = -radius; dx <= radius; ++dx) {
        Cell f{c.x + dx, c.y + dy};
        if (in_bounds(f) && is_obstacle(f)) return false;
      }
    return true;
  }

  friend bool operator==(const Workspace& a, const Workspace& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.obstacles_ == b.obstacles_;
  }

 private:
  int width_ = 1;
  int height_ = 1;
  std::vector<Cell> obstacles_;
  std::vector<std::uint8_t> blocked_ = std::vector<std::uint8_t>(1, 0);
};

struct RobotSpec {
  int id = 1;
  Cell start;
  Cell resting;
  int radius = 0;
  int max_speed = 1;

  friend bool operator==(const RobotSpec&, const RobotSpec&) = default;
};

// Footprints of two robots intersect.
inline bool footprints_overlap(Cell a, int radius_a, Cell b, int radius_b) {
  return chebyshev(a, b) <= radius_a + radius_b;
}

struct GoToPose {
  Cell goal;
  friend bool operator==(const GoToPose&, const GoToPose&) = default;
};

struct PickPlace {
  Cell pick;
  Cell place;
  friend bool operator==(const PickPlace&, const PickPlace&) = default;
};

using TaskKind = std::variant<GoToPose, PickPlace>;

struct TaskSpec {
  int id = 1;
  TaskKind kind;
  std::vector<int> capable_robots;  // sorted, unique
  int dwell = 0;

  // Cells the robot has to reach, in order. One for GoToPose, two for PickPlace.
  std::vector<Cell> action_cells() const {
    if (const auto* g = std::get_if<GoToPose>(&kind)) return {g->goal};
    const auto& p = std::get<PickPlace>(kind);
    return {p.pick, p.place};
  }
  Cell final_cell() const { return action_cells().back(); }

  bool capable(int robot_id) const {
    return std::binary_search(capable_robots.begin(), capable_robots.end(), robot_id);
  }

  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

struct PrecedenceEdge {
  int before = 0;
  int after = 0;
  friend bool operator==(const PrecedenceEdge&, const PrecedenceEdge&) = default;
};

class PrecedenceDag {
 public:
  PrecedenceDag() = default;
  explicit PrecedenceDag(std::vector<PrecedenceEdge> edges) : edges_(std::move(edges)) {}

  const std::vector<PrecedenceEdge>& edges() const { return edges_; }
  bool empty() const { return edges_.empty(); }

  std::vector<int> predecessors(int task) const {
    std::vector<int> out;
    for (const auto& e : edges_)
      if (e.after == task) out.push_back(e.before);
    return out;
  }

  // Kahn's algorithm over tasks 1..n.
  bool acyclic(int task_count) const {
    std::vector<int> indeg(task_count + 1, 0);
    for (const auto& e : edges_) ++indeg[e.after];
    std::vector<int> ready;
    for (int t = 1; t <= task_count; ++t)
      if (indeg[t] == 0) ready.push_back(t);
    int seen = 0;
    while (!ready.empty()) {
      int t = ready.back();
      ready.pop_back();
      ++seen;
      for (const auto& e : edges_)
        if (e.before == t && --indeg[e.after] == 0) ready.push_back(e.after);
    }
    return seen == task_count;
  }

  friend bool operator==(const PrecedenceDag&, const PrecedenceDag&) = default;

 private:
  std::vector<PrecedenceEdge> edges_;
};

struct Scenario {
  std::string name;
  Workspace workspace;
  std::vector<RobotSpec> robots;
  std::vector<TaskSpec> tasks;
  PrecedenceDag precedence;

  int robot_count() const { return static_cast<int>(robots.size()); }
  int task_count() const { return static_cast<int>(tasks.size()); }
  const RobotSpec& robot(int id) const { return robots.at(id - 1); }
  const TaskSpec& task(int id) const { return tasks.at(id - 1); }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

namespace detail {
inline std::string cell_str(Cell c) {
  return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
}
}  // namespace detail

// Throws ValidationError naming the first violated invariant.
inline void validate_scenario(const Scenario& s) {
  using detail::cell_str;
  const auto& ws = s.workspace;
  if (s.robots.empty()) throw ValidationError("scenario: no robots");
  for (int i = 0; i < s.robot_count(); ++i) {
    const auto& r = s.robots[i];
    const std::string tag = "robot " + std::to_string(r.id);
    if (r.id != i + 1) throw ValidationError("robot ids must be contiguous 1..R (found " + std::to_string(r.id) + ")");
    if (r.radius < 0) throw ValidationError(tag + ": radius must be >= 0");
    if (r.max_speed < 1) throw ValidationError(tag + ": max_speed must be >= 1");
    if (!ws.footprint_free(r.start, r.radius))
      throw ValidationError(tag + ": start " + cell_str(r.start) + " out of bounds or on an obstacle");
    if (!ws.footprint_free(r.resting, r.radius))
      throw ValidationError(tag + ": resting " + cell_str(r.resting) + " out of bounds or on an obstacle");
  }
  for (int i = 0; i < s.robot_count(); ++i)
    for (int j = i + 1; j < s.robot_count(); ++j) {
      const auto& a = s.robots[i];
      const auto& b = s.robots[j];
      if (footprints_overlap(a.resting, a.radius, b.resting, b.radius))
        throw ValidationError("resting footprints of robots " + std::to_string(a.id) + " and " +
                              std::to_string(b.id) + " overlap");
      if (footprints_overlap(a.start, a.radius, b.start, b.radius))
        throw ValidationError("start footprints of robots " + std::to_string(a.id) + " and " +
                              std::to_string(b.id) + " overlap");
    }

  for (int i = 0; i < s.task_count(); ++i) {
    const auto& t = s.tasks[i];
    const std::string tag = "task " + std::to_string(t.id);
    if (t.id != i + 1) throw ValidationError("task ids must be contiguous 1..N (found " + std::to_string(t.id) + ")");
    if (t.dwell < 0) throw ValidationError(tag + ": dwell must be >= 0");
    if (t.capable_robots.empty()) throw ValidationError(tag + ": capable set is empty");
    if (!std::is_sorted(t.capable_robots.begin(), t.capable_robots.end()) ||
        std::adjacent_find(t.capable_robots.begin(), t.capable_robots.end()) != t.capable_robots.end())
      throw ValidationError(tag + ": capable set must be sorted and unique");
    for (int r : t.capable_robots)
      if (r < 1 || r > s.robot_count())
        throw ValidationError(tag + ": capable robot " + std::to_string(r) + " does not exist");
    for (Cell c : t.action_cells()) {
      if (!ws.in_bounds(c) || ws.is_obstacle(c))
        throw ValidationError(tag + ": cell " + cell_str(c) + " out of bounds or on an obstacle");
      for (int r : t.capable_robots)
        if (!ws.footprint_free(c, s.robot(r).radius))
          throw ValidationError(tag + ": cell " + cell_str(c) + " unreachable for robot " +
                                std::to_string(r) + " footprint");
    }
  }
  for (const auto& e : s.precedence.edges()) {
    if (e.before < 1 || e.before > s.task_count() || e.after < 1 || e.after > s.task_count())
      throw ValidationError("precedence edge references an unknown task");
    if (e.before == e.after) throw ValidationError("precedence edge is a self loop");
  }
  if (!s.precedence.acyclic(s.task_count())) throw ValidationError("precedence graph has a cycle");
}

}  // namespace seqplan
