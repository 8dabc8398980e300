#pragma once

#include <algorithm>
#include <atomic>
#include <cassert>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "seqplan/obstacle_field.hpp"
#include "seqplan/rng.hpp"
#include "seqplan/scenario.hpp"
#include "seqplan/sequence.hpp"
#include "seqplan/spacetime_planner.hpp"

namespace seqplan {

// Committed world after planning a prefix of a sequence.
struct PlanningState {
  ObstacleField field;
  std::vector<int> finish_times;  // one per planned entry
};

struct PlanResult {
  std::vector<std::vector<Cell>> paths;  // per robot, one cell per timestep from t = 0, final escape included
  std::vector<int> finish_times;         // per sequence entry
  int makespan = 0;                      // latest task finish; escapes excluded

  friend bool operator==(const PlanResult&, const PlanResult&) = default;
};

enum class EvalStatus { Planned, Pruned, Infeasible };

struct EvalOutcome {
  EvalStatus status = EvalStatus::Infeasible;
  PlanResult result;            // valid when status == Planned
  std::string reason;           // why a candidate was pruned or infeasible
  std::size_t resumed_from = 0; // entries reused from the cache

  bool planned() const { return status == EvalStatus::Planned; }
};

struct EvaluatorOptions {
  std::uint64_t seed = 0;  // seeds shortcutting, combined with the prefix key per entry
  bool shortcut = true;
  int shortcut_attempts = 100;
  bool prune = true;  // lower-bound early stopping against the incumbent
};

namespace detail {

inline std::uint64_t entry_hash(std::uint64_t prefix_hash, const SequenceEntry& e) {
  return mix_seed(prefix_hash, (static_cast<std::uint64_t>(e.task) << 32) ^ static_cast<std::uint64_t>(e.robot));
}

struct PrefixHash {
  std::size_t operator()(const std::vector<SequenceEntry>& key) const {
    std::uint64_t h = 0;
    for (const auto& e : key) h = entry_hash(h, e);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace detail

// Committed planning states keyed by sequence prefix, with approximate LRU
// eviction. Lookups share a lock; insertion and eviction are exclusive. One
// cache must only ever see a single scenario and EvaluatorOptions.
class PrefixCache {
 public:
  explicit PrefixCache(std::size_t budget = 10000) : budget_(std::max<std::size_t>(budget, 1)) {}

  struct Hit {
    std::size_t length = 0;
    std::shared_ptr<const PlanningState> state;  // null when nothing matched
  };

  // Longest cached prefix of `seq` (possibly the empty prefix).
  Hit lookup(const SerializedSequence& seq) const {
    std::shared_lock lock(mutex_);
    std::vector<SequenceEntry> key(seq.begin(), seq.end());
    for (std::size_t m = seq.size() + 1; m-- > 0;) {
      key.resize(m);
      auto it = map_.find(key);
      if (it != map_.end()) {
        it->second.last_used.store(++clock_, std::memory_order_relaxed);
        hits_.fetch_add(1, std::memory_order_relaxed);
        return {m, it->second.state};
      }
    }
    misses_.fetch_add(1, std::memory_order_relaxed);
    return {};
  }

  void insert(std::span<const SequenceEntry> prefix, std::shared_ptr<const PlanningState> state) {
    std::unique_lock lock(mutex_);
    std::vector<SequenceEntry> key(prefix.begin(), prefix.end());
    auto [it, inserted] = map_.try_emplace(std::move(key), std::move(state), ++clock_);
    if (!inserted) it->second.last_used.store(clock_, std::memory_order_relaxed);
    if (map_.size() > budget_) evict();
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return map_.size();
  }
  std::size_t budget() const { return budget_; }
  std::size_t hits() const { return hits_.load(); }
  std::size_t misses() const { return misses_.load(); }

  void clear() {
    std::unique_lock lock(mutex_);
    map_.clear();
  }

 private:
  struct Slot {
    Slot(std::shared_ptr<const PlanningState> s, std::uint64_t t) : state(std::move(s)), last_used(t) {}
    std::shared_ptr<const PlanningState> state;
    mutable std::atomic<std::uint64_t> last_used;
  };

  // Drops the least recently used tenth (at least down to the budget).
  void evict() {
    std::vector<std::pair<std::uint64_t, const std::vector<SequenceEntry>*>> order;
    order.reserve(map_.size());
    for (const auto& [k, slot] : map_) order.emplace_back(slot.last_used.load(), &k);
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    const std::size_t drop = std::max(map_.size() - budget_, budget_ / 10);
    std::vector<std::vector<SequenceEntry>> victims;
    for (std::size_t i = 0; i < drop && i < order.size(); ++i) victims.push_back(*order[i].second);
    for (const auto& v : victims) map_.erase(v);
  }

  std::size_t budget_;
  mutable std::shared_mutex mutex_;
  mutable std::atomic<std::uint64_t> clock_{0};
  mutable std::atomic<std::size_t> hits_{0};
  mutable std::atomic<std::size_t> misses_{0};
  std::unordered_map<std::vector<SequenceEntry>, Slot, detail::PrefixHash> map_;
};

// World before any task: robots at their start cells, each with an escape to
// its resting cell planned in robot order. nullopt if such an escape fails.
inline std::optional<PlanningState> initial_state(const Scenario& scenario) {
  PlanningState st{ObstacleField(scenario), {}};
  for (const auto& r : scenario.robots) {
    auto esc = plan_escape(r.id, r.start, 0, st.field, scenario.workspace);
    if (!esc) return std::nullopt;
    st.field.set_escape(*esc);
  }
  return st;
}

// Admissible bound on the makespan of any completion of `state`, which holds
// the plans for seq[0, from_index). Each remaining entry finishes no earlier
// than its robot's ready time plus straight-line travel over its action
// cells, and strictly after the preceding entry.
inline int remaining_lower_bound(const SerializedSequence& seq, std::size_t from_index, const PlanningState& state,
                                 const Scenario& scenario) {
  int prev = from_index > 0 ? state.finish_times.at(from_index - 1) : -1;
  if (from_index >= seq.size()) return std::max(prev, 0);
  std::vector<int> ready(scenario.robot_count());
  std::vector<Cell> pos(scenario.robot_count());
  for (int r = 1; r <= scenario.robot_count(); ++r) {
    ready[r - 1] = state.field.committed_end_time(r);
    pos[r - 1] = state.field.committed_end_cell(r);
  }
  for (std::size_t j = from_index; j < seq.size(); ++j) {
    const auto& task = scenario.task(seq[j].task);
    const int r = seq[j].robot;
    const int speed = scenario.robot(r).max_speed;
    int travel = 0;
    Cell cur = pos[r - 1];
    for (Cell c : task.action_cells()) {
      travel += straight_line_lower_bound(cur, c, speed) + task.dwell;
      cur = c;
    }
    prev = std::max(ready[r - 1] + travel, prev + 1);
    ready[r - 1] = prev;
    pos[r - 1] = cur;
  }
  return prev;
}

namespace detail {

// Plans entry j into `st`: the robot drops its tentative escape, visits the
// task's action cells (the last one finishing after the previous entry), and
// gets a fresh escape. Returns an error message on failure.
inline std::optional<std::string> plan_entry(PlanningState& st, const Scenario& scenario, std::size_t j,
                                             const SequenceEntry& entry, std::uint64_t seed,
                                             const EvaluatorOptions& opts) {
  const auto& ws = scenario.workspace;
  const auto& task = scenario.task(entry.task);
  const int robot = entry.robot;
  st.field.discard_escape(robot);
  Cell pos = st.field.committed_end_cell(robot);
  int t = st.field.committed_end_time(robot);
  const int min_finish = j > 0 ? st.finish_times[j - 1] + 1 : 0;

  const auto cells = task.action_cells();
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const bool last = k + 1 == cells.size();
    PlanQuery q{robot, pos, t, cells[k], last ? std::max(min_finish, t) : t, task.dwell};
    auto planned = plan_path(q, st.field, ws);
    if (!planned)
      return "no path for task " + std::to_string(entry.task) + " (action " + std::to_string(k) + ") on robot " +
             std::to_string(robot);
    Trajectory traj = std::move(planned->trajectory);
    if (opts.shortcut) {
      Trajectory motion{robot, t, {traj.cells.begin(), traj.cells.begin() + (planned->arrival - t + 1)}};
      motion = shortcut(motion, st.field, ws, mix_seed(seed, k), opts.shortcut_attempts);
      std::copy(motion.cells.begin(), motion.cells.end(), traj.cells.begin());
    }
    st.field.commit(traj);
    pos = cells[k];
    t = planned->finish;
  }
  st.finish_times.push_back(t);

  auto esc = plan_escape(robot, pos, t, st.field, ws);
  if (!esc) return "no escape path for robot " + std::to_string(robot) + " after task " + std::to_string(entry.task);
  st.field.set_escape(*esc);
  return std::nullopt;
}

inline PlanResult to_result(const PlanningState& st, const Scenario& scenario) {
  PlanResult out;
  for (int r = 1; r <= scenario.robot_count(); ++r) out.paths.push_back(st.field.timeline(r));
  out.finish_times = st.finish_times;
  out.makespan = st.finish_times.empty() ? 0 : *std::max_element(st.finish_times.begin(), st.finish_times.end());
  return out;
}

}  // namespace detail

// Plans the entries of `seq` one by one against everything committed before
// them. Reuses the longest cached prefix when a cache is given, and stops
// early once the lower bound reaches `incumbent`.
inline EvalOutcome plan_given_sequence(const SerializedSequence& seq, const Scenario& scenario,
                                       std::optional<int> incumbent, PrefixCache* cache,
                                       const EvaluatorOptions& opts = {}) {
  if (auto bad = validate_sequence(seq, scenario)) throw std::invalid_argument("invalid sequence: " + *bad);

  EvalOutcome out;
  std::optional<PlanningState> st;
  if (cache) {
    auto hit = cache->lookup(seq);
    if (hit.state) {
      st = *hit.state;
      out.resumed_from = hit.length;
    }
  }
  if (!st) {
    st = initial_state(scenario);
    if (!st) {
      out.reason = "initial escape to resting cells failed";
      return out;
    }
    if (cache) cache->insert(seq.prefix(0), std::make_shared<const PlanningState>(*st));
  }

  std::uint64_t prefix_hash = 0;
  for (std::size_t j = 0; j < out.resumed_from; ++j) prefix_hash = detail::entry_hash(prefix_hash, seq[j]);
  [[maybe_unused]] const int bound_at_resume = remaining_lower_bound(seq, out.resumed_from, *st, scenario);

  for (std::size_t j = out.resumed_from; j < seq.size(); ++j) {
    if (opts.prune && incumbent) {
      const int lb = remaining_lower_bound(seq, j, *st, scenario);
      if (lb >= *incumbent) {
        out.status = EvalStatus::Pruned;
        out.reason = "lower bound " + std::to_string(lb) + " >= incumbent " + std::to_string(*incumbent) +
                     " at entry " + std::to_string(j);
        return out;
      }
    }
    prefix_hash = detail::entry_hash(prefix_hash, seq[j]);
    if (auto err = detail::plan_entry(*st, scenario, j, seq[j], mix_seed(opts.seed, prefix_hash), opts)) {
      out.reason = *err;
      return out;
    }
    if (cache) cache->insert(seq.prefix(j + 1), std::make_shared<const PlanningState>(*st));
  }

  out.status = EvalStatus::Planned;
  out.result = detail::to_result(*st, scenario);
  assert(bound_at_resume <= out.result.makespan);
  return out;
}

}  // namespace seqplan
