#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <random>
#include <vector>

#include "wcg/builtin.hpp"
#include "wcg/counts.hpp"
#include "wcg/instance.hpp"
#include "wcg/policies.hpp"
#include "wcg/validate.hpp"

using namespace wcg;

namespace {

// single gang, one state, two actions with coupling costs (-1, +1)
WcgInstance seesaw_instance() {
  WcgInstance inst;
  GangSpec g;
  g.num_states = 1;
  g.num_actions = 2;
  g.transitions = {{{1.0}}, {{1.0}}};
  g.rewards = {{0.0, 0.0}};
  inst.gangs = {g};
  inst.horizon = 1;
  inst.base_pops = {1};
  inst.init_dist = {{1.0}};
  ConstraintTable tab;
  tab.per_gang = {{{-1.0, 1.0}}};
  inst.constraints = {tab};
  return inst;
}

StateCounts census_of(const GsaIndex& idx, std::int64_t h,
                      const std::vector<std::int64_t>& counts) {
  StateCounts sc;
  sc.h = h;
  sc.counts = counts;
  (void)idx;
  return sc;
}

}  // namespace

TEST_CASE("proportional rounding floors non-anchor shares") {
  WcgInstance inst;
  GangSpec g;
  g.num_states = 1;
  g.num_actions = 2;
  g.transitions = {{{1.0}}, {{1.0}}};
  g.rewards = {{0.0, 0.0}};
  inst.gangs = {g};
  inst.horizon = 0;
  inst.base_pops = {1};
  inst.init_dist = {{1.0}};
  const GsaIndex idx(inst);
  const std::vector<std::vector<int>> anchor = {{0}};

  SUBCASE("half-half over three members") {
    const auto occ = proportional_decide(inst, idx, census_of(idx, 3, {3}), {0.5, 0.5}, anchor, 0);
    CHECK(occ.counts == std::vector<std::int64_t>{2, 1});
  }
  SUBCASE("point mass on the anchor") {
    const auto occ = proportional_decide(inst, idx, census_of(idx, 5, {5}), {1.0, 0.0}, anchor, 0);
    CHECK(occ.counts == std::vector<std::int64_t>{5, 0});
  }
  SUBCASE("empty state stays empty") {
    const auto occ = proportional_decide(inst, idx, census_of(idx, 1, {0}), {0.5, 0.5}, anchor, 0);
    CHECK(occ.counts == std::vector<std::int64_t>{0, 0});
  }
  SUBCASE("anchor can be any action") {
    inst.gangs[0].num_actions = 3;
    inst.gangs[0].transitions = {{{1.0}}, {{1.0}}, {{1.0}}};
    inst.gangs[0].rewards = {{0.0, 0.0, 0.0}};
    const GsaIndex idx3(inst);
    const auto occ = proportional_decide(inst, idx3, census_of(idx3, 10, {10}),
                                         {0.3, 0.65, 0.05}, {{1}}, 0);
    // floors 3 and 0 for the outsiders, the anchor absorbs 7
    CHECK(occ.counts == std::vector<std::int64_t>{3, 7, 0});
  }
  SUBCASE("integer shares survive round-off") {
    // 0.1 * 30 is 2.9999... in floating point; the nudge keeps the seat
    const auto occ = proportional_decide(inst, idx, census_of(idx, 30, {30}), {0.9, 0.1}, anchor, 0);
    CHECK(occ.counts == std::vector<std::int64_t>{27, 3});
  }
}

TEST_CASE("adaption moves mass down the cost ladder") {
  const WcgInstance inst = seesaw_instance();
  const GsaIndex idx(inst);
  const auto anchor = common_min_actions(inst);
  REQUIRE(anchor[0][0] == 0);

  OccupancyCounts occ;
  occ.h = 4;
  occ.t = 0;
  occ.counts = {0, 4};  // lhs = +4/4 = 1, violated
  const std::vector<double> key = {0.0, 1.0};

  const AdaptionStats stats = adapt_decision(inst, idx, occ, key, anchor);
  CHECK(occ.counts == std::vector<std::int64_t>{2, 2});
  CHECK(stats.moved_total == 2);
  CHECK(stats.constraints_hit == 1);
  CHECK(constraint_lhs(inst, idx, occ, 0) == doctest::Approx(0.0));
}

TEST_CASE("adaption leaves feasible decisions alone") {
  const WcgInstance inst = seesaw_instance();
  const GsaIndex idx(inst);
  const auto anchor = common_min_actions(inst);
  OccupancyCounts occ;
  occ.h = 4;
  occ.counts = {3, 1};  // lhs = -2/4
  const AdaptionStats stats = adapt_decision(inst, idx, occ, {0.0, 1.0}, anchor);
  CHECK_FALSE(stats.adapted());
  CHECK(occ.counts == std::vector<std::int64_t>{3, 1});
}

TEST_CASE("adaption gives up when no action is cheaper") {
  WcgInstance inst = seesaw_instance();
  inst.constraints[0].per_gang = {{{1.0, 1.0}}};  // violated whatever the split
  const GsaIndex idx(inst);
  OccupancyCounts occ;
  occ.h = 2;
  occ.counts = {1, 1};
  try {
    adapt_decision(inst, idx, occ, {0.0, 1.0}, {{0}});
    FAIL("expected the adaption to give up");
  } catch (const AdaptionExhausted& e) {
    CHECK(e.constraint == 0);
    REQUIRE(e.residual_lhs.size() == 1);
    CHECK(e.residual_lhs[0] == doctest::Approx(1.0));
  }
}

TEST_CASE("randomized decisions keep exact marginals and feasibility") {
  RandomSpec spec;
  spec.num_gangs = 3;
  spec.max_states = 3;
  spec.max_actions = 4;
  spec.num_constraints = 2;
  spec.point_mass_init = false;
  std::mt19937_64 rng(2024);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const WcgInstance inst = make_random_instance(spec, seed);
    const GsaIndex idx(inst);
    const ValidationReport rep = validate_instance(inst);
    REQUIRE(rep.ok());
    REQUIRE(rep.assumption_holds);

    const std::int64_t h = 1 + static_cast<std::int64_t>(rng() % 12);
    StateCounts census;
    census.h = h;
    census.counts.assign(idx.pair_count(), 0);
    for (int i = 0; i < inst.num_gangs(); ++i) {
      std::int64_t left = h * inst.base_pops[i];
      while (left > 0) {
        census.counts[idx.pair(i, static_cast<int>(rng() % inst.gangs[i].num_states))] += 1;
        --left;
      }
    }

    // random probability rows play the role of the plan
    std::vector<double> alpha(idx.triple_count(), 0.0);
    for (int p = 0; p < idx.pair_count(); ++p) {
      const PairRef pr = idx.pair_at(p);
      const int na = idx.actions_of(pr.gang);
      double total = 0.0;
      std::vector<double> raw(na);
      for (int a = 0; a < na; ++a) total += raw[a] = static_cast<double>(rng() % 1000 + 1);
      for (int a = 0; a < na; ++a) alpha[idx.triple(pr.gang, pr.state, a)] = raw[a] / total;
    }

    OccupancyCounts occ = proportional_decide(inst, idx, census, alpha, rep.min_actions, 0);
    for (int p = 0; p < idx.pair_count(); ++p) {
      const PairRef pr = idx.pair_at(p);
      std::int64_t row = 0;
      for (int a = 0; a < idx.actions_of(pr.gang); ++a)
        row += occ.counts[idx.triple(pr.gang, pr.state, a)];
      CHECK(row == census.counts[p]);
    }

    adapt_decision(inst, idx, occ, alpha, rep.min_actions);
    for (std::int64_t c : occ.counts) CHECK(c >= 0);
    for (int p = 0; p < idx.pair_count(); ++p) {
      const PairRef pr = idx.pair_at(p);
      std::int64_t row = 0;
      for (int a = 0; a < idx.actions_of(pr.gang); ++a)
        row += occ.counts[idx.triple(pr.gang, pr.state, a)];
      CHECK(row == census.counts[p]);  // marginals survive the repair
    }
    for (const auto& chk : check_hard_constraints(inst, idx, occ)) CHECK(chk.satisfied);
  }
}

TEST_CASE("myopic decision takes the richest action") {
  WcgInstance inst;
  GangSpec g;
  g.num_states = 1;
  g.num_actions = 2;
  g.transitions = {{{1.0}}, {{1.0}}};
  g.rewards = {{0.0, 5.0}};
  inst.gangs = {g};
  inst.horizon = 0;
  inst.base_pops = {1};
  inst.init_dist = {{1.0}};
  const GsaIndex idx(inst);

  SUBCASE("clear winner") {
    const auto occ = greedy_decide(inst, idx, census_of(idx, 4, {4}), 0);
    CHECK(occ.counts == std::vector<std::int64_t>{0, 4});
  }
  SUBCASE("ties go to the lowest action") {
    inst.gangs[0].rewards = {{5.0, 5.0}};
    const auto occ = greedy_decide(inst, idx, census_of(idx, 4, {4}), 0);
    CHECK(occ.counts == std::vector<std::int64_t>{4, 0});
  }
}

TEST_CASE("myopic ordering key is the weighted reward") {
  WcgInstance inst;
  GangSpec g;
  g.num_states = 1;
  g.num_actions = 2;
  g.transitions = {{{1.0}}, {{1.0}}};
  g.rewards = {{2.0, 7.0}};
  inst.gangs = {g, g};
  inst.horizon = 0;
  inst.base_pops = {1, 3};
  inst.init_dist = {{1.0}, {1.0}};
  const GsaIndex idx(inst);
  const auto key = greedy_order_key(inst, idx);
  CHECK(key[idx.triple(0, 0, 0)] == 2.0);
  CHECK(key[idx.triple(0, 0, 1)] == 7.0);
  CHECK(key[idx.triple(1, 0, 0)] == 6.0);
  CHECK(key[idx.triple(1, 0, 1)] == 21.0);
}

TEST_CASE("waterfilling walks the ranking") {
  SUBCASE("partial fill") {
    const auto alpha = priority_allocation({0.2, 0.5, 0.3}, {0, 1, 2}, 0.3);
    REQUIRE(alpha.size() == 3);
    CHECK(alpha[0] == doctest::Approx(1.0));
    CHECK(alpha[1] == doctest::Approx(0.2));
    CHECK(alpha[2] == doctest::Approx(0.0));
  }
  SUBCASE("ranking permutes the walk") {
    const auto alpha = priority_allocation({0.2, 0.5, 0.3}, {2, 1, 0}, 0.3);
    CHECK(alpha[2] == doctest::Approx(1.0));
    CHECK(alpha[1] == doctest::Approx(0.0));
    CHECK(alpha[0] == doctest::Approx(0.0));
  }
  SUBCASE("budget above the total mass saturates everything") {
    const auto alpha = priority_allocation({0.2, 0.5, 0.2}, {0, 1, 2}, 0.95);
    for (double a : alpha) CHECK(a == doctest::Approx(1.0));
  }
  SUBCASE("activated mass is exact") {
    const std::vector<double> y = {0.1, 0.4, 0.2, 0.3};
    const auto alpha = priority_allocation(y, {3, 1, 0, 2}, 0.55);
    double mass = 0.0;
    for (size_t s = 0; s < y.size(); ++s) mass += alpha[s] * y[s];
    CHECK(mass == doctest::Approx(0.55).epsilon(1e-12));
  }
  SUBCASE("budget domain is open") {
    CHECK_THROWS_AS(priority_allocation({1.0}, {0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(priority_allocation({1.0}, {0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(priority_allocation({1.0}, {0}, -0.2), std::invalid_argument);
  }
  SUBCASE("ranking must be a permutation") {
    CHECK_THROWS_AS(priority_allocation({0.5, 0.5}, {0, 0}, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(priority_allocation({0.5, 0.5}, {0}, 0.5), std::invalid_argument);
  }
}

TEST_CASE("integer priority fill respects census and budget") {
  WcgInstance inst;
  GangSpec g;
  g.num_states = 2;
  g.num_actions = 2;
  g.transitions = {{{1.0, 0.0}, {0.0, 1.0}}, {{1.0, 0.0}, {0.0, 1.0}}};
  g.rewards = {{0.0, 1.0}, {0.0, 1.0}};
  inst.gangs = {g};
  inst.horizon = 0;
  inst.base_pops = {10};
  inst.init_dist = {{0.5, 0.5}};
  const GsaIndex idx(inst);

  StateCounts census;
  census.h = 1;
  census.counts = {6, 4};
  // budget 0.3 of 10 members = 3 activations, all soaked up by state 1 first
  const auto occ = priority_decide(inst, idx, census, {1, 0}, 0.3, 0);
  CHECK(occ.counts[idx.triple(0, 1, 1)] == 3);
  CHECK(occ.counts[idx.triple(0, 1, 0)] == 1);
  CHECK(occ.counts[idx.triple(0, 0, 1)] == 0);
  CHECK(occ.counts[idx.triple(0, 0, 0)] == 6);

  SUBCASE("two actions are required") {
    inst.gangs[0].num_actions = 3;
    inst.gangs[0].transitions.push_back({{1.0, 0.0}, {0.0, 1.0}});
    inst.gangs[0].rewards = {{0, 1, 2}, {0, 1, 2}};
    const GsaIndex idx3(inst);
    CHECK_THROWS_AS(priority_decide(inst, idx3, census, {1, 0}, 0.3, 0), std::invalid_argument);
  }
}

TEST_CASE("member action lists expand occupancies in order") {
  WcgInstance inst;
  GangSpec g;
  g.num_states = 2;
  g.num_actions = 3;
  g.transitions.assign(3, {{1.0, 0.0}, {0.0, 1.0}});
  g.rewards = {{0, 0, 0}, {0, 0, 0}};
  inst.gangs = {g};
  inst.horizon = 0;
  inst.base_pops = {1};
  inst.init_dist = {{1.0, 0.0}};
  const GsaIndex idx(inst);

  OccupancyCounts occ;
  occ.h = 6;
  occ.counts = {2, 0, 1, 0, 3, 0};
  const auto assigned = realize_actions(idx, occ);
  REQUIRE(assigned.size() == static_cast<size_t>(idx.pair_count()));
  CHECK(assigned[idx.pair(0, 0)] == std::vector<int>{0, 0, 2});
  CHECK(assigned[idx.pair(0, 1)] == std::vector<int>{1, 1, 1});
}
