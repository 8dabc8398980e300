#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "seqplan/scenario.hpp"

namespace seqplan {

// Timed path of one robot: cells[k] is its cell at timestep start_time + k.
struct Trajectory {
  int robot_id = 0;
  int start_time = 0;
  std::vector<Cell> cells;

  bool empty() const { return cells.empty(); }
  int end_time() const { return start_time + static_cast<int>(cells.size()) - 1; }
  Cell front() const { return cells.front(); }
  Cell back() const { return cells.back(); }
  Cell at(int t) const { return cells.at(static_cast<std::size_t>(t - start_time)); }

  // Sum of Euclidean step lengths.
  double moved_distance() const {
    double d = 0.0;
    for (std::size_t k = 1; k < cells.size(); ++k)
      d += std::hypot(cells[k].x - cells[k - 1].x, cells[k].y - cells[k - 1].y);
    return d;
  }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

// Time-indexed positions of every robot: committed motion from t = 0, then an
// optional tentative escape, then stationary at the last cell forever.
class ObstacleField {
 public:
  struct Agent {
    int radius = 0;
    int max_speed = 1;
    Cell resting;
    std::vector<Cell> committed;  // committed[t], t >= 0; never empty
    std::vector<Cell> escape;     // escape[k] at committed_end + k; empty or escape[0] == committed.back()
  };

  ObstacleField() = default;

  explicit ObstacleField(const Scenario& scenario) {
    agents_.reserve(scenario.robots.size());
    for (const auto& r : scenario.robots) agents_.push_back(Agent{r.radius, r.max_speed, r.resting, {r.start}, {}});
  }

  int robot_count() const { return static_cast<int>(agents_.size()); }
  const Agent& agent(int robot_id) const { return agents_.at(robot_id - 1); }

  Cell position(int robot_id, int t) const {
    const Agent& a = agents_[robot_id - 1];
    const int committed_len = static_cast<int>(a.committed.size());
    if (t < committed_len) return a.committed[t < 0 ? 0 : t];
    if (a.escape.empty()) return a.committed.back();
    const int k = t - (committed_len - 1);
    return k < static_cast<int>(a.escape.size()) ? a.escape[k] : a.escape.back();
  }

  int committed_end_time(int robot_id) const { return static_cast<int>(agent(robot_id).committed.size()) - 1; }
  Cell committed_end_cell(int robot_id) const { return agent(robot_id).committed.back(); }

  // Last timestep at which the robot's timeline changes.
  int timeline_end(int robot_id) const {
    const Agent& a = agent(robot_id);
    const int escape_steps = a.escape.empty() ? 0 : static_cast<int>(a.escape.size()) - 1;
    return static_cast<int>(a.committed.size()) - 1 + escape_steps;
  }

  // Last timestep at which any robot other than `except` changes position.
  int last_event_time(int except = 0) const {
    int t = 0;
    for (int r = 1; r <= robot_count(); ++r)
      if (r != except) t = std::max(t, timeline_end(r));
    return t;
  }

  // Full timeline (committed followed by escape), one cell per timestep from 0.
  std::vector<Cell> timeline(int robot_id) const {
    const Agent& a = agent(robot_id);
    std::vector<Cell> out = a.committed;
    if (!a.escape.empty()) out.insert(out.end(), a.escape.begin() + 1, a.escape.end());
    return out;
  }

  // Appends a trajectory that starts where and when the robot's committed motion ends.
  void commit(const Trajectory& traj) {
    Agent& a = agents_.at(traj.robot_id - 1);
    if (traj.cells.empty() || traj.start_time != static_cast<int>(a.committed.size()) - 1 ||
        traj.front() != a.committed.back())
      throw std::logic_error("commit: trajectory does not continue the committed timeline");
    a.committed.insert(a.committed.end(), traj.cells.begin() + 1, traj.cells.end());
    a.escape.clear();
  }

  void set_escape(const Trajectory& traj) {
    Agent& a = agents_.at(traj.robot_id - 1);
    if (traj.cells.empty() || traj.start_time != static_cast<int>(a.committed.size()) - 1 ||
        traj.front() != a.committed.back())
      throw std::logic_error("set_escape: trajectory does not start at the committed end");
    a.escape = traj.cells;
  }

  void discard_escape(int robot_id) { agents_.at(robot_id - 1).escape.clear(); }

  // Footprint of `robot_id` at `c` intersects some other robot at time t.
  bool collides(int robot_id, Cell c, int t) const {
    const int radius = agents_[robot_id - 1].radius;
    for (int r = 1; r <= robot_count(); ++r) {
      if (r == robot_id) continue;
      if (footprints_overlap(c, radius, position(r, t), agents_[r - 1].radius)) return true;
    }
    return false;
  }

  // Moving from -> to over [t, t+1] exchanges cells with another robot.
  bool swap_conflict(int robot_id, Cell from, Cell to, int t) const {
    if (from == to) return false;
    for (int r = 1; r <= robot_count(); ++r) {
      if (r == robot_id) continue;
      if (position(r, t) == to && position(r, t + 1) == from) return true;
    }
    return false;
  }

 private:
  std::vector<Agent> agents_;
};

}  // namespace seqplan
