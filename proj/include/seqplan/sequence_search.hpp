#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <stdexcept>
#include <vector>

#include "seqplan/rng.hpp"
#include "seqplan/scenario.hpp"
#include "seqplan/sequence.hpp"
#include "seqplan/spacetime_planner.hpp"

namespace seqplan {

// No valid sequence can be constructed (some task is never ready for a capable robot).
class SequenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// Tracks which tasks are placed so far and which are ready to be placed next.
class ReadySet {
 public:
  explicit ReadySet(const Scenario& s) : scenario_(s), placed_(s.task_count() + 1, false) {
    preds_.resize(s.task_count() + 1);
    for (const auto& e : s.precedence.edges()) preds_[e.after].push_back(e.before);
  }

  bool done() const { return remaining_ == 0; }
  void place(int task) {
    placed_[task] = true;
    --remaining_;
  }

  // Unplaced tasks robot `r` may take right now, in task id order.
  std::vector<int> candidates(int robot) const {
    std::vector<int> out;
    for (const auto& t : scenario_.tasks) {
      if (placed_[t.id] || !t.capable(robot)) continue;
      bool ready = std::all_of(preds_[t.id].begin(), preds_[t.id].end(), [&](int p) { return placed_[p]; });
      if (ready) out.push_back(t.id);
    }
    return out;
  }

 private:
  const Scenario& scenario_;
  std::vector<bool> placed_;
  std::vector<std::vector<int>> preds_;
  int remaining_ = scenario_.task_count();
};

// Round-robin over robots; `choose` picks one of the candidates for a robot.
// Robots without a candidate are skipped.
template <typename Choose>
SerializedSequence round_robin(const Scenario& scenario, Choose&& choose) {
  ReadySet ready(scenario);
  std::vector<SequenceEntry> entries;
  int robot = 1;
  int idle = 0;
  while (!ready.done()) {
    auto cands = ready.candidates(robot);
    if (cands.empty()) {
      if (++idle >= scenario.robot_count())
        throw SequenceError("no robot can take any remaining task (capability or precedence deadlock)");
    } else {
      idle = 0;
      const int task = choose(robot, cands);
      ready.place(task);
      entries.push_back({task, robot});
    }
    robot = robot % scenario.robot_count() + 1;
  }
  return SerializedSequence(std::move(entries));
}

}  // namespace detail

// Random round-robin initialisation: each robot in turn takes a uniformly
// drawn feasible, precedence-ready task.
inline SerializedSequence initialize_sequence(const Scenario& scenario, SeededRng& rng) {
  return detail::round_robin(scenario, [&](int, const std::vector<int>& cands) { return cands[rng.index(cands.size())]; });
}

// Greedy alternating baseline: round-robin, each robot takes the remaining task
// whose first action cell is closest to where the robot ended its previous task.
inline SerializedSequence greedy_baseline_sequence(const Scenario& scenario) {
  std::vector<Cell> pos;
  for (const auto& r : scenario.robots) pos.push_back(r.start);
  return detail::round_robin(scenario, [&](int robot, const std::vector<int>& cands) {
    const int speed = scenario.robot(robot).max_speed;
    int best = cands.front();
    int best_lb = INT_MAX;
    for (int t : cands) {
      const int lb = straight_line_lower_bound(pos[robot - 1], scenario.task(t).action_cells().front(), speed);
      if (lb < best_lb) {
        best_lb = lb;
        best = t;
      }
    }
    pos[robot - 1] = scenario.task(best).final_cell();
    return best;
  });
}

// All tasks on one robot, nearest-first. nullopt if the robot cannot do every task.
inline std::optional<SerializedSequence> single_robot_sequence(const Scenario& scenario, int robot_id) {
  for (const auto& t : scenario.tasks)
    if (!t.capable(robot_id)) return std::nullopt;
  const RobotSpec& robot = scenario.robot(robot_id);
  Cell pos = robot.start;
  detail::ReadySet ready(scenario);
  std::vector<SequenceEntry> entries;
  while (!ready.done()) {
    auto cands = ready.candidates(robot_id);
    if (cands.empty()) return std::nullopt;
    int best = cands.front();
    int best_lb = INT_MAX;
    for (int t : cands) {
      const int lb = straight_line_lower_bound(pos, scenario.task(t).action_cells().front(), robot.max_speed);
      if (lb < best_lb) {
        best_lb = lb;
        best = t;
      }
    }
    pos = scenario.task(best).final_cell();
    ready.place(best);
    entries.push_back({best, robot_id});
  }
  return SerializedSequence(std::move(entries));
}

// Deterministic mutation primitives.

inline SerializedSequence swap_entries(const SerializedSequence& seq, std::size_t i, std::size_t j) {
  auto e = seq.entries();
  std::swap(e.at(i), e.at(j));
  return SerializedSequence(std::move(e));
}

// Reverses entries i..j inclusive.
inline SerializedSequence reverse_range(const SerializedSequence& seq, std::size_t i, std::size_t j) {
  auto e = seq.entries();
  if (i > j) std::swap(i, j);
  std::reverse(e.begin() + static_cast<std::ptrdiff_t>(i), e.begin() + static_cast<std::ptrdiff_t>(j) + 1);
  return SerializedSequence(std::move(e));
}

inline SerializedSequence reassign_robot(const SerializedSequence& seq, std::size_t i, int robot) {
  auto e = seq.entries();
  e.at(i).robot = robot;
  return SerializedSequence(std::move(e));
}

// Single random attempts. Each returns nullopt if the sampled move is invalid.

inline std::optional<SerializedSequence> swap_robot(const SerializedSequence& seq, const Scenario& scenario,
                                                    SeededRng& rng) {
  if (seq.empty()) return std::nullopt;
  const std::size_t i = rng.index(seq.size());
  std::vector<int> others;
  for (int r : scenario.task(seq[i].task).capable_robots)
    if (r != seq[i].robot) others.push_back(r);
  if (others.empty()) return std::nullopt;
  return reassign_robot(seq, i, others[rng.index(others.size())]);
}

inline std::optional<SerializedSequence> swap_random_elements(const SerializedSequence& seq,
                                                              const Scenario& scenario, SeededRng& rng) {
  if (seq.size() < 2) return std::nullopt;
  const std::size_t i = rng.index(seq.size());
  std::size_t j = rng.index(seq.size() - 1);
  if (j >= i) ++j;
  auto out = swap_entries(seq, i, j);
  if (!respects_precedence(out, scenario)) return std::nullopt;
  return out;
}

inline std::optional<SerializedSequence> reverse_subtour(const SerializedSequence& seq, const Scenario& scenario,
                                                         SeededRng& rng) {
  if (seq.size() < 2) return std::nullopt;
  std::size_t i = rng.index(seq.size());
  std::size_t j = rng.index(seq.size() - 1);
  if (j >= i) ++j;
  auto out = reverse_range(seq, i, j);
  if (!respects_precedence(out, scenario)) return std::nullopt;
  return out;
}

enum class Mutation { SwapRobot, SwapElements, ReverseSubtour };

struct NeighborConfig {
  // Probabilities of SwapRobot and SwapElements; ReverseSubtour takes the rest.
  double p_swap_robot = 1.0 / 3.0;
  double p_swap_elements = 1.0 / 3.0;
  int retry_cap = 50;
};

struct NeighborProposal {
  SerializedSequence sequence;
  Mutation mutation = Mutation::SwapRobot;
  bool applied = false;  // false: every retry was rejected and the input came back unchanged
};

// Draws one mutation kind, then retries that mutation until it yields a valid
// sequence or the retry cap is hit.
inline NeighborProposal propose_neighbor(const SerializedSequence& seq, const Scenario& scenario, SeededRng& rng,
                                         const NeighborConfig& cfg = {}) {
  const double u = rng.unit();
  NeighborProposal out;
  out.mutation = u < cfg.p_swap_robot                         ? Mutation::SwapRobot
                 : u < cfg.p_swap_robot + cfg.p_swap_elements ? Mutation::SwapElements
                                                              : Mutation::ReverseSubtour;
  for (int attempt = 0; attempt < cfg.retry_cap; ++attempt) {
    std::optional<SerializedSequence> cand;
    switch (out.mutation) {
      case Mutation::SwapRobot: cand = swap_robot(seq, scenario, rng); break;
      case Mutation::SwapElements: cand = swap_random_elements(seq, scenario, rng); break;
      case Mutation::ReverseSubtour: cand = reverse_subtour(seq, scenario, rng); break;
    }
    if (cand) {
      out.sequence = std::move(*cand);
      out.applied = true;
      return out;
    }
  }
  out.sequence = seq;
  return out;
}

inline SerializedSequence generate_neighbor(const SerializedSequence& seq, const Scenario& scenario, SeededRng& rng,
                                            const NeighborConfig& cfg = {}) {
  return propose_neighbor(seq, scenario, rng, cfg).sequence;
}

}  // namespace seqplan
