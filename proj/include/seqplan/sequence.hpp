#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqplan/scenario.hpp"

namespace seqplan {

struct SequenceEntry {
  int task = 0;
  int robot = 0;
  friend bool operator==(const SequenceEntry&, const SequenceEntry&) = default;
};

// A total order over all (task, robot) pairs. It fixes the assignment of
// robots to tasks and, through its order, the finishing order of the tasks.
class SerializedSequence {
 public:
  SerializedSequence() = default;
  explicit SerializedSequence(std::vector<SequenceEntry> entries) : entries_(std::move(entries)) {}

  const std::vector<SequenceEntry>& entries() const { return entries_; }
  std::span<const SequenceEntry> prefix(std::size_t m) const { return {entries_.data(), m}; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const SequenceEntry& operator[](std::size_t j) const { return entries_[j]; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  // Robot owning entry j.
  int robot_of(std::size_t j) const { return entries_[j].robot; }

  // Position of entry j inside its robot's own task list.
  int index_in_robot_sequence(std::size_t j) const {
    int k = 0;
    for (std::size_t i = 0; i < j; ++i)
      if (entries_[i].robot == entries_[j].robot) ++k;
    return k;
  }

  // Per-robot task lists s^r, indexed by robot id - 1.
  std::vector<std::vector<int>> per_robot(int robot_count) const {
    std::vector<std::vector<int>> out(robot_count);
    for (const auto& e : entries_) out.at(e.robot - 1).push_back(e.task);
    return out;
  }

  friend bool operator==(const SerializedSequence&, const SerializedSequence&) = default;

 private:
  std::vector<SequenceEntry> entries_;
};

inline std::string to_string(const SerializedSequence& seq) {
  std::string out;
  for (const auto& e : seq) {
    if (!out.empty()) out += ' ';
    out += "(" + std::to_string(e.task) + "," + std::to_string(e.robot) + ")";
  }
  return out;
}

// Returns a description of the first violated invariant, or nullopt if valid.
inline std::optional<std::string> validate_sequence(const SerializedSequence& seq, const Scenario& scenario) {
  const int n = scenario.task_count();
  std::vector<int> position(n + 1, -1);
  for (std::size_t j = 0; j < seq.size(); ++j) {
    const auto& e = seq[j];
    if (e.task < 1 || e.task > n) return "unknown task " + std::to_string(e.task);
    if (position[e.task] >= 0) return "task repeated: " + std::to_string(e.task);
    position[e.task] = static_cast<int>(j);
    if (e.robot < 1 || e.robot > scenario.robot_count()) return "unknown robot " + std::to_string(e.robot);
    if (!scenario.task(e.task).capable(e.robot))
      return "robot " + std::to_string(e.robot) + " not capable of task " + std::to_string(e.task);
  }
  for (int t = 1; t <= n; ++t)
    if (position[t] < 0) return "task missing: " + std::to_string(t);
  for (const auto& edge : scenario.precedence.edges())
    if (position[edge.before] > position[edge.after])
      return "precedence: task " + std::to_string(edge.after) + " placed before task " +
             std::to_string(edge.before);
  return std::nullopt;
}

// Respects the precedence graph: no task placed before one of its predecessors.
inline bool respects_precedence(const SerializedSequence& seq, const Scenario& scenario) {
  if (scenario.precedence.empty()) return true;
  std::vector<int> position(scenario.task_count() + 1, -1);
  for (std::size_t j = 0; j < seq.size(); ++j) position[seq[j].task] = static_cast<int>(j);
  for (const auto& edge : scenario.precedence.edges())
    if (position[edge.before] > position[edge.after]) return false;
  return true;
}

}  // namespace seqplan
