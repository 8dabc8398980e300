#include <thread>

#include "gtest_helpers.hpp"

using namespace seqplan;
using support::go_to;
using support::make_scenario;
using support::robot;
using support::seq_of;

namespace {

EvalOutcome plan(const SerializedSequence& seq, const Scenario& s, PrefixCache* cache = nullptr,
                 std::optional<int> incumbent = std::nullopt, EvaluatorOptions opts = {}) {
  return plan_given_sequence(seq, s, incumbent, cache, opts);
}

// Walks `seq` entry by entry and checks every finish time and every escape
// against the brute-force oracle, given what was committed before it.
// GoToPose tasks only.
void expect_entries_match_oracle(const SerializedSequence& seq, const Scenario& s, const PlanResult& result) {
  auto st = initial_state(s);
  ASSERT_TRUE(st);
  const auto grid = support::grid_of(s.workspace);
  std::uint64_t prefix = 0;
  for (std::size_t j = 0; j < seq.size(); ++j) {
    const auto& e = seq[j];
    const auto& task = s.task(e.task);
    const auto& me = s.robot(e.robot);
    ObstacleField before = st->field;
    before.discard_escape(e.robot);
    oracle::Query q{before.committed_end_cell(e.robot),
                    before.committed_end_time(e.robot),
                    task.final_cell(),
                    j > 0 ? st->finish_times[j - 1] + 1 : 0,
                    task.dwell,
                    false,
                    me.radius,
                    me.max_speed,
                    200};
    const auto expected = oracle::earliest_finish(grid, support::movers_except(before, e.robot), q);
    ASSERT_TRUE(expected) << "entry " << j;

    prefix = detail::entry_hash(prefix, e);
    ASSERT_EQ(detail::plan_entry(*st, s, j, e, mix_seed(0, prefix), EvaluatorOptions{}), std::nullopt);
    EXPECT_EQ(st->finish_times[j], *expected) << "entry " << j;
    EXPECT_EQ(st->finish_times[j], result.finish_times[j]) << "entry " << j;

    // escape: earliest time the robot can be home for good
    ObstacleField without = st->field;
    without.discard_escape(e.robot);
    oracle::Query esc{task.final_cell(), st->finish_times[j], me.resting, st->finish_times[j], 0, true,
                      me.radius,         me.max_speed,       200};
    const auto home = oracle::earliest_finish(grid, support::movers_except(without, e.robot), esc);
    ASSERT_TRUE(home);
    EXPECT_EQ(st->field.timeline_end(e.robot), *home) << "escape after entry " << j;
  }
}

}  // namespace

TEST(PlanGivenSequence, SingleTask) {
  const Scenario s = make_scenario(10, 10, {}, {robot(1, {0, 0})}, {go_to(1, {3, 0}, {1})});
  const auto seq = seq_of({{1, 1}});
  const auto out = plan(seq, s);
  ASSERT_TRUE(out.planned());
  EXPECT_EQ(out.result.makespan, 3);
  EXPECT_TRUE(ValidPlan(s, seq, out.result));
}

TEST(PlanGivenSequence, EscapeIsNotPartOfMakespan) {
  const Scenario s = make_scenario(10, 10, {}, {robot(1, {0, 0})}, {go_to(1, {3, 0}, {1}, 2)});
  const auto seq = seq_of({{1, 1}});
  const auto out = plan(seq, s);
  ASSERT_TRUE(out.planned());
  EXPECT_EQ(out.result.makespan, 5);
  const auto& path = out.result.paths[0];
  EXPECT_EQ(path.back(), (Cell{0, 0}));  // went home afterwards
  EXPECT_EQ(path.size(), 9u);            // 5 steps of task, 3 back
  EXPECT_TRUE(ValidPlan(s, seq, out.result));
}

TEST(PlanGivenSequence, IndependentRobots) {
  const Scenario s = make_scenario(20, 10, {}, {robot(1, {0, 0}), robot(2, {19, 9})},
                                   {go_to(1, {4, 2}, {1, 2}), go_to(2, {12, 3}, {1, 2})});
  const auto seq = seq_of({{1, 1}, {2, 2}});
  const auto out = plan(seq, s);
  ASSERT_TRUE(out.planned());
  // solo times: 4 for robot 1, 7 for robot 2
  EXPECT_EQ(out.result.finish_times, (std::vector<int>{4, 7}));
  EXPECT_EQ(out.result.makespan, 7);
  EXPECT_TRUE(ValidPlan(s, seq, out.result));
}

TEST(PlanGivenSequence, FinishTimesStrictlyIncrease) {
  // both tasks are 2 steps away; the second entry must finish after the first
  const Scenario s = make_scenario(10, 10, {}, {robot(1, {0, 0}), robot(2, {9, 9})},
                                   {go_to(1, {2, 0}, {1, 2}), go_to(2, {7, 9}, {1, 2})});
  const auto seq = seq_of({{1, 1}, {2, 2}});
  const auto out = plan(seq, s);
  ASSERT_TRUE(out.planned());
  EXPECT_EQ(out.result.finish_times, (std::vector<int>{2, 3}));
  EXPECT_TRUE(ValidPlan(s, seq, out.result));
}

TEST(PlanGivenSequence, CorridorBothSerializations) {
  // Row 2 is a one-wide corridor between two open bays. Each robot must
  // cross to the other side, so they have to take turns.
  std::vector<Cell> walls;
  for (int x = 3; x <= 6; ++x)
    for (int y : {0, 1, 3, 4}) walls.push_back({x, y});
  const Scenario s = make_scenario(10, 5, walls, {robot(1, {0, 2}), robot(2, {9, 2})},
                                   {go_to(1, {8, 0}, {1}), go_to(2, {1, 4}, {2})});
  const auto a_first = seq_of({{1, 1}, {2, 2}});
  const auto b_first = seq_of({{2, 2}, {1, 1}});
  std::vector<int> makespans;
  for (const auto& seq : {a_first, b_first}) {
    const auto out = plan(seq, s);
    ASSERT_TRUE(out.planned());
    EXPECT_TRUE(ValidPlan(s, seq, out.result));
    expect_entries_match_oracle(seq, s, out.result);
    makespans.push_back(out.result.makespan);
  }
  const int best = std::min(makespans[0], makespans[1]);
  EXPECT_GT(best, 9);  // someone waits

  OptimizerConfig cfg;
  cfg.max_outer_iter = 3;
  cfg.max_inner_iter = 10;
  const auto res = optimize(s, cfg);
  EXPECT_EQ(res.best.makespan, best);
  EXPECT_TRUE(ValidPlan(s, res.best_sequence, res.best));
}

TEST(PlanGivenSequence, RandomInstancesMatchOracleStepwise) {
  std::mt19937_64 rng(404);
  int checked = 0;
  for (int k = 0; k < 2000 && checked < 10; ++k) {
    Scenario s = support::random_scenario(rng, 4, 2);
    bool all_goto = std::all_of(s.tasks.begin(), s.tasks.end(),
                                [](const TaskSpec& t) { return std::holds_alternative<GoToPose>(t.kind); });
    if (!all_goto) continue;
    const auto seq = support::random_sequence(s, static_cast<std::uint64_t>(k));
    const auto out = plan(seq, s);
    if (!out.planned()) continue;
    EXPECT_TRUE(ValidPlan(s, seq, out.result));
    expect_entries_match_oracle(seq, s, out.result);
    ++checked;
  }
  EXPECT_EQ(checked, 10);
}

TEST(PlanGivenSequence, PickPlaceVisitsBothCells) {
  const Scenario s = make_scenario(10, 5, {}, {robot(1, {0, 0})},
                                   {support::pick_place(1, {3, 0}, {3, 4}, {1}, 1)});
  const auto seq = seq_of({{1, 1}});
  const auto out = plan(seq, s);
  ASSERT_TRUE(out.planned());
  // 3 to the pick, hold 1, 4 to the place, hold 1
  EXPECT_EQ(out.result.makespan, 9);
  EXPECT_EQ(out.result.paths[0][3], (Cell{3, 0}));
  EXPECT_EQ(out.result.paths[0][4], (Cell{3, 0}));
  EXPECT_TRUE(ValidPlan(s, seq, out.result));
}

TEST(PlanGivenSequence, RejectsInvalidSequence) {
  const Scenario s = make_scenario(10, 10, {}, {robot(1, {0, 0})}, {go_to(1, {3, 0}, {1})});
  EXPECT_THROW(plan(seq_of({{1, 2}}), s), std::invalid_argument);
  EXPECT_THROW(plan(seq_of({}), s), std::invalid_argument);
}

TEST(PlanGivenSequence, PrunesAgainstIncumbent) {
  const Scenario s = support::bundled("grid2");
  const auto seq = greedy_baseline_sequence(s);
  const auto full = plan(seq, s);
  ASSERT_TRUE(full.planned());
  const int m = full.result.makespan;

  const auto pruned = plan(seq, s, nullptr, m / 2);
  EXPECT_EQ(pruned.status, EvalStatus::Pruned);
  EXPECT_FALSE(pruned.reason.empty());

  // the bound never exceeds the real makespan, so this one must go through
  const auto loose = plan(seq, s, nullptr, m + 1);
  ASSERT_TRUE(loose.planned());
  EXPECT_EQ(loose.result, full.result);

  EvaluatorOptions no_prune;
  no_prune.prune = false;
  const auto unpruned = plan(seq, s, nullptr, 1, no_prune);
  ASSERT_TRUE(unpruned.planned());
  EXPECT_EQ(unpruned.result, full.result);
}

TEST(RemainingLowerBound, NothingLeft) {
  const Scenario s = support::bundled("lis_large");
  const auto seq = greedy_baseline_sequence(s);
  PrefixCache cache;
  const auto out = plan(seq, s, &cache);
  ASSERT_TRUE(out.planned());
  const auto hit = cache.lookup(seq);
  ASSERT_EQ(hit.length, seq.size());
  EXPECT_EQ(remaining_lower_bound(seq, seq.size(), *hit.state, s), out.result.makespan);
}

TEST(RemainingLowerBound, SingleRemainingTask) {
  const Scenario s =
      make_scenario(12, 3, {}, {robot(1, {0, 0})}, {go_to(1, {2, 0}, {1}), go_to(2, {9, 0}, {1})});
  const auto seq = seq_of({{1, 1}, {2, 1}});
  PrefixCache cache;
  ASSERT_TRUE(plan(seq, s, &cache).planned());
  const auto hit = cache.lookup(seq_of({{1, 1}}));
  ASSERT_EQ(hit.length, 1u);
  EXPECT_EQ(hit.state->finish_times[0], 2);
  EXPECT_EQ(remaining_lower_bound(seq, 1, *hit.state, s), 2 + 7);
}

TEST(RemainingLowerBound, AdmissibleOnRandomInstances) {
  std::mt19937_64 rng(5150);
  int trials = 0, violations = 0;
  while (trials < 300) {
    const Scenario s = support::random_scenario(rng, 6, 2);
    const auto seq = support::random_sequence(s, rng());
    PrefixCache cache;
    EvaluatorOptions opts;
    opts.prune = false;
    const auto out = plan(seq, s, &cache, std::nullopt, opts);
    if (!out.planned()) continue;
    EXPECT_TRUE(ValidPlan(s, seq, out.result));
    for (std::size_t m = 0; m <= seq.size(); ++m) {
      const auto hit = cache.lookup(SerializedSequence(std::vector<SequenceEntry>(seq.begin(), seq.begin() + static_cast<long>(m))));
      ASSERT_EQ(hit.length, m);
      if (remaining_lower_bound(seq, m, *hit.state, s) > out.result.makespan) ++violations;
    }
    ++trials;
  }
  EXPECT_EQ(violations, 0);
}

TEST(PrefixCache, WarmEqualsCold) {
  for (const auto& name : support::bundled_names()) {
    const Scenario s = support::bundled(name);
    PrefixCache cache;
    SeededRng rng(17);
    auto seq = initialize_sequence(s, rng);
    std::size_t resumed = 0;
    for (int k = 0; k < 30; ++k) {
      // neighbours share prefixes, so the cache actually gets used
      seq = k % 5 == 0 ? initialize_sequence(s, rng) : generate_neighbor(seq, s, rng);
      const auto warm = plan(seq, s, &cache);
      const auto cold = plan(seq, s);
      ASSERT_EQ(warm.status, cold.status) << name;
      EXPECT_EQ(warm.result, cold.result) << name << " sequence " << k;
      if (warm.planned()) EXPECT_TRUE(ValidPlan(s, seq, warm.result));
      resumed += warm.resumed_from;
    }
    EXPECT_GT(resumed, 0u) << name;
    EXPECT_GT(cache.hits(), 0u);
  }
}

TEST(PrefixCache, LongestPrefixAndEviction) {
  const Scenario s = support::bundled("grid2");
  PrefixCache cache(20);
  const auto seq = greedy_baseline_sequence(s);
  ASSERT_TRUE(plan(seq, s, &cache).planned());
  EXPECT_LE(cache.size(), 20u);
  // the full sequence is the most recent insertion
  EXPECT_EQ(cache.lookup(seq).length, seq.size());

  auto other = swap_entries(seq, 14, 15);
  EXPECT_EQ(cache.lookup(other).length, 14u);

  PrefixCache big;
  ASSERT_TRUE(plan(seq, s, &big).planned());
  EXPECT_EQ(big.size(), seq.size() + 1);
  big.clear();
  EXPECT_EQ(big.lookup(seq).length, 0u);
  EXPECT_FALSE(big.lookup(seq).state);
}

TEST(PrefixCache, SharedAcrossThreads) {
  const Scenario s = support::bundled("binpick2");
  std::vector<SerializedSequence> seqs;
  SeededRng rng(8);
  auto seq = initialize_sequence(s, rng);
  for (int k = 0; k < 24; ++k) seqs.push_back(seq = generate_neighbor(seq, s, rng));
  std::vector<PlanResult> cold;
  for (const auto& q : seqs) cold.push_back(plan(q, s).result);

  PrefixCache shared(50);
  std::vector<PlanResult> warm(seqs.size());
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < 4; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = static_cast<std::size_t>(w); i < seqs.size(); i += 4)
          warm[i] = plan(seqs[i], s, &shared).result;
      });
  }
  for (std::size_t i = 0; i < seqs.size(); ++i) EXPECT_EQ(warm[i], cold[i]) << i;
}

TEST(CheckPlan, CatchesBrokenPlans) {
  const Scenario s = make_scenario(10, 10, {{5, 5}}, {robot(1, {0, 0}), robot(2, {9, 0})},
                                   {go_to(1, {3, 0}, {1, 2}), go_to(2, {6, 0}, {1, 2})});
  const auto seq = seq_of({{1, 1}, {2, 2}});
  const auto good = plan(seq, s);
  ASSERT_TRUE(good.planned());
  EXPECT_TRUE(ValidPlan(s, seq, good.result));

  auto collide = good.result;
  collide.paths[1] = collide.paths[0];
  collide.paths[1][0] = {9, 0};
  EXPECT_FALSE(check_plan(s, seq, collide).empty());

  // robots walk towards each other and trade cells between t=4 and t=5
  PlanResult swap;
  swap.paths = {{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}}, {{9, 0}, {8, 0}, {7, 0}, {6, 0}, {5, 0}, {4, 0}}};
  swap.finish_times = {3, 4};
  swap.makespan = 4;
  auto problems = check_plan(s, seq, swap);
  EXPECT_TRUE(std::any_of(problems.begin(), problems.end(),
                          [](const std::string& p) { return p.find("swap") != std::string::npos; }));

  auto fast = good.result;
  fast.paths[0][1] = {4, 4};
  EXPECT_FALSE(check_plan(s, seq, fast).empty());

  auto order = good.result;
  std::swap(order.finish_times[0], order.finish_times[1]);
  EXPECT_FALSE(check_plan(s, seq, order).empty());

  auto obstacle = good.result;
  obstacle.paths[0].push_back({5, 5});
  EXPECT_FALSE(check_plan(s, seq, obstacle).empty());
}
