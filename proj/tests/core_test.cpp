#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "wcg/builtin.hpp"
#include "wcg/counts.hpp"
#include "wcg/instance.hpp"
#include "wcg/validate.hpp"

using namespace wcg;

namespace {

GangSpec uniform_gang(int ns, int na) {
  GangSpec g;
  g.num_states = ns;
  g.num_actions = na;
  const double p = 1.0 / ns;
  g.transitions.assign(na, std::vector<std::vector<double>>(ns, std::vector<double>(ns, p)));
  g.rewards.assign(ns, std::vector<double>(na, 0.0));
  return g;
}

WcgInstance two_gang_toy() {
  WcgInstance inst;
  inst.gangs = {uniform_gang(2, 3), uniform_gang(3, 2)};
  inst.horizon = 2;
  inst.base_pops = {1, 2};
  inst.init_dist = {{1.0, 0.0}, {0.2, 0.3, 0.5}};
  return inst;
}

ConstraintTable zero_table(const WcgInstance& inst) {
  ConstraintTable tab;
  for (const auto& g : inst.gangs)
    tab.per_gang.emplace_back(g.num_states, std::vector<double>(g.num_actions, 0.0));
  return tab;
}

bool has_code(const std::vector<ValidationIssue>& issues, const char* code) {
  for (const auto& it : issues)
    if (it.code == code) return true;
  return false;
}

}  // namespace

TEST_CASE("triple and pair indexing round-trips") {
  const WcgInstance inst = two_gang_toy();
  const GsaIndex idx(inst);

  CHECK(idx.triple_count() == 2 * 3 + 3 * 2);
  CHECK(idx.pair_count() == 2 + 3);

  int expect = 0;
  for (int i = 0; i < inst.num_gangs(); ++i)
    for (int s = 0; s < inst.gangs[i].num_states; ++s)
      for (int a = 0; a < inst.gangs[i].num_actions; ++a) {
        const int flat = idx.triple(i, s, a);
        CHECK(flat == expect++);  // gang-major, then state, then action
        const TripleRef ref = idx.triple_at(flat);
        CHECK(ref.gang == i);
        CHECK(ref.state == s);
        CHECK(ref.action == a);
        CHECK(idx.pair_of_triple(flat) == idx.pair(i, s));
      }
  for (int p = 0; p < idx.pair_count(); ++p) {
    const PairRef pr = idx.pair_at(p);
    CHECK(idx.pair(pr.gang, pr.state) == p);
  }
}

TEST_CASE("initial counts follow largest remainders") {
  WcgInstance inst;
  inst.gangs = {uniform_gang(2, 1)};
  inst.horizon = 1;
  inst.base_pops = {1};
  inst.init_dist = {{1.0, 0.0}};
  GsaIndex idx(inst);

  SUBCASE("point mass stays put") {
    const StateCounts sc = scale_initial_counts(inst, idx, 7);
    CHECK(sc.counts == std::vector<std::int64_t>{7, 0});
  }
  SUBCASE("half-half over three members ties to the lower state") {
    inst.init_dist = {{0.5, 0.5}};
    inst.base_pops = {3};
    const StateCounts sc = scale_initial_counts(inst, GsaIndex(inst), 1);
    CHECK(sc.counts == std::vector<std::int64_t>{2, 1});
  }
  SUBCASE("thirds at population six come out exact") {
    inst.init_dist = {{1.0 / 3.0, 2.0 / 3.0}};
    inst.base_pops = {2};
    const StateCounts sc = scale_initial_counts(inst, GsaIndex(inst), 3);
    CHECK(sc.counts == std::vector<std::int64_t>{2, 4});
  }
  SUBCASE("leftover seat goes to the largest remainder") {
    inst.gangs = {uniform_gang(3, 1)};
    inst.init_dist = {{0.25, 0.25, 0.5}};
    inst.base_pops = {2};
    const StateCounts sc = scale_initial_counts(inst, GsaIndex(inst), 1);
    CHECK(sc.counts == std::vector<std::int64_t>{1, 0, 1});
  }
}

TEST_CASE("initial counts conserve every gang population") {
  RandomSpec spec;
  spec.num_gangs = 3;
  spec.max_states = 4;
  spec.point_mass_init = false;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const WcgInstance inst = make_random_instance(spec, seed);
    const GsaIndex idx(inst);
    for (std::int64_t h : {1, 2, 3, 17}) {
      const StateCounts sc = scale_initial_counts(inst, idx, h);
      for (int i = 0; i < inst.num_gangs(); ++i) {
        std::int64_t total = 0;
        for (int s = 0; s < inst.gangs[i].num_states; ++s) total += sc.at(idx, i, s);
        CHECK(total == h * inst.base_pops[i]);
      }
      for (std::int64_t c : sc.counts) CHECK(c >= 0);
    }
  }
}

TEST_CASE("coupling lhs matches direct summation") {
  RandomSpec spec;
  spec.num_gangs = 2;
  spec.num_constraints = 3;
  std::mt19937_64 rng(99);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const WcgInstance inst = make_random_instance(spec, seed);
    const GsaIndex idx(inst);
    OccupancyCounts occ;
    occ.h = 4;
    occ.counts.assign(idx.triple_count(), 0);
    // arbitrary split of each gang population over its triples
    for (int i = 0; i < inst.num_gangs(); ++i) {
      std::int64_t left = occ.h * inst.base_pops[i];
      while (left > 0) {
        const int s = static_cast<int>(rng() % inst.gangs[i].num_states);
        const int a = static_cast<int>(rng() % inst.gangs[i].num_actions);
        occ.counts[idx.triple(i, s, a)] += 1;
        --left;
      }
    }
    for (int ell = 0; ell < inst.num_constraints(); ++ell) {
      double direct = 0.0;
      for (int i = 0; i < inst.num_gangs(); ++i)
        for (int s = 0; s < inst.gangs[i].num_states; ++s)
          for (int a = 0; a < inst.gangs[i].num_actions; ++a)
            direct += static_cast<double>(inst.base_pops[i]) *
                      inst.constraints[ell].per_gang[i][s][a] *
                      static_cast<double>(occ.counts[idx.triple(i, s, a)]);
      direct /= static_cast<double>(occ.h * inst.total_base_pop());
      CHECK(constraint_lhs(inst, idx, occ, ell) == doctest::Approx(direct).epsilon(1e-12));
    }
    // scale invariance: doubling h and every count leaves the share unchanged
    OccupancyCounts doubled = occ;
    doubled.h *= 2;
    for (auto& c : doubled.counts) c *= 2;
    for (int ell = 0; ell < inst.num_constraints(); ++ell)
      CHECK(constraint_lhs(inst, idx, doubled, ell) ==
            doctest::Approx(constraint_lhs(inst, idx, occ, ell)).epsilon(1e-12));
  }
}

TEST_CASE("hard constraint check sits exactly on the boundary") {
  WcgInstance inst = two_gang_toy();
  ConstraintTable tab = zero_table(inst);
  inst.constraints = {tab};
  const GsaIndex idx(inst);
  OccupancyCounts occ;
  occ.h = 1;
  occ.counts.assign(idx.triple_count(), 0);
  occ.counts[idx.triple(0, 0, 0)] = 1;
  occ.counts[idx.triple(1, 0, 0)] = 2;

  SUBCASE("zero cost table is satisfied with zero lhs") {
    const auto checks = check_hard_constraints(inst, idx, occ);
    REQUIRE(checks.size() == 1);
    CHECK(checks[0].satisfied);
    CHECK(checks[0].lhs == 0.0);
  }
  SUBCASE("a small positive lhs fails") {
    inst.constraints[0].per_gang[0][0][0] = 3e-6;  // lhs = 3e-6 / 3 = 1e-6
    const auto checks = check_hard_constraints(inst, idx, occ);
    CHECK_FALSE(checks[0].satisfied);
    CHECK(checks[0].lhs == doctest::Approx(1e-6));
  }
  SUBCASE("no constraints means an empty report") {
    inst.constraints.clear();
    CHECK(check_hard_constraints(inst, idx, occ).empty());
  }
}

TEST_CASE("benchmark tables carry the published values") {
  const WcgInstance inst = make_builtin("appendix-g");
  REQUIRE(inst.num_gangs() == 5);
  REQUIRE(inst.num_constraints() == 6);
  CHECK(inst.horizon == 30);

  // gang 1, occupied state: 110.3085 * 1 * 0.3 minus the flat capacity rent
  for (int a = 0; a < inst.gangs[0].num_actions; ++a)
    CHECK(inst.gangs[0].rewards[1][a] == doctest::Approx(29.70355).epsilon(1e-12));

  // gang 2 capacity row 1: usage 1 * min{2, 1+1} cancels the 8/4 share
  CHECK(inst.constraints[1].per_gang[1][1][1] == doctest::Approx(0.0));

  // arrival gang: fresh-arrival draw from the empty queue lands one phase on
  const int arrival = 4;
  CHECK(inst.gangs[arrival].num_actions == 1);
  CHECK(inst.gangs[arrival].num_states == 31 * 31);
  CHECK(inst.gangs[arrival].transitions[0][0][1] == doctest::Approx(std::exp(-10.0)).epsilon(1e-12));

  // every kernel row is exactly stochastic after tail folding
  const ValidationReport rep = validate_instance(inst);
  CHECK(rep.ok());
  CHECK(rep.max_row_residual <= 1e-12);
  CHECK(rep.assumption_holds);
  for (int i = 0; i < 4; ++i)
    for (int s = 0; s < inst.gangs[i].num_states; ++s) CHECK(rep.min_actions[i][s] == 0);
  REQUIRE(rep.degenerate_gangs.size() == 1);
  CHECK(rep.degenerate_gangs[0] == arrival);

  // two invocations agree entry for entry
  const WcgInstance again = make_builtin("appendix-g");
  CHECK(again.gangs[arrival].transitions == inst.gangs[arrival].transitions);
  CHECK(again.gangs[2].rewards == inst.gangs[2].rewards);
}

TEST_CASE("validation accepts a clean unconstrained instance") {
  WcgInstance inst;
  GangSpec g = uniform_gang(2, 2);
  inst.gangs = {g};
  inst.horizon = 1;
  inst.base_pops = {1};
  inst.init_dist = {{0.5, 0.5}};
  const ValidationReport rep = validate_instance(inst);
  CHECK(rep.ok());
  CHECK(rep.warnings.empty());
  CHECK(rep.assumption_holds);
}

TEST_CASE("validation rejects structural defects") {
  WcgInstance base = two_gang_toy();
  base.constraints = {zero_table(base)};

  SUBCASE("negative probability") {
    WcgInstance inst = base;
    inst.gangs[0].transitions[0][0] = {-0.1, 1.1};
    const ValidationReport rep = validate_instance(inst);
    CHECK_FALSE(rep.ok());
    CHECK(has_code(rep.errors, "probability"));
  }
  SUBCASE("row that does not sum to one") {
    WcgInstance inst = base;
    inst.gangs[0].transitions[0][0] = {0.6, 0.6};
    const ValidationReport rep = validate_instance(inst);
    CHECK_FALSE(rep.ok());
    CHECK(has_code(rep.errors, "stochastic"));
    CHECK(rep.max_row_residual == doctest::Approx(0.2));
  }
  SUBCASE("initial distribution off by mass") {
    WcgInstance inst = base;
    inst.init_dist[0] = {0.7, 0.7};
    CHECK(has_code(validate_instance(inst).errors, "init"));
  }
  SUBCASE("missing base population") {
    WcgInstance inst = base;
    inst.base_pops = {1};
    CHECK(has_code(validate_instance(inst).errors, "shape"));
  }
}

TEST_CASE("validation warns when cost minimizers disagree") {
  WcgInstance inst;
  inst.gangs = {uniform_gang(1, 2)};
  inst.horizon = 1;
  inst.base_pops = {1};
  inst.init_dist = {{1.0}};
  ConstraintTable t1 = zero_table(inst), t2 = zero_table(inst);
  t1.per_gang[0][0] = {0.0, 1.0};  // action 0 cheaper
  t2.per_gang[0][0] = {1.0, 0.0};  // action 1 cheaper
  inst.constraints = {t1, t2};

  const ValidationReport rep = validate_instance(inst);
  CHECK(rep.ok());
  CHECK_FALSE(rep.assumption_holds);
  CHECK(has_code(rep.warnings, "assumption"));
  CHECK(rep.min_actions[0][0] == -1);
}

TEST_CASE("validation flags single-action gangs") {
  WcgInstance inst = two_gang_toy();
  inst.gangs[0] = uniform_gang(2, 1);
  const ValidationReport rep = validate_instance(inst);
  REQUIRE(rep.degenerate_gangs.size() == 1);
  CHECK(rep.degenerate_gangs[0] == 0);
}

TEST_CASE("common minimizer table prefers the lowest action") {
  WcgInstance inst;
  inst.gangs = {uniform_gang(1, 3)};
  inst.horizon = 0;
  inst.base_pops = {1};
  inst.init_dist = {{1.0}};
  ConstraintTable t = zero_table(inst);
  t.per_gang[0][0] = {2.0, 2.0, 5.0};  // tie between actions 0 and 1
  inst.constraints = {t};
  const auto mins = common_min_actions(inst);
  CHECK(mins[0][0] == 0);
}
