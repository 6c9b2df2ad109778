#pragma once

#include <cstdint>
#include <vector>

#include "wcg/counts.hpp"
#include "wcg/instance.hpp"
#include "wcg/simplex.hpp"

namespace wcg {

enum class RowType { Flow, Normalization, Initial, Coupling };

struct LpRowInfo {
  RowType type;
  int t = 0;
  int gang = 0;
  int state = 0;
  int ell = 0;
};

// Occupancy linear program over per-gang state-action frequencies.
// Variable var(t, j) is the epoch-t frequency of triple j, in [0, 1];
// flow, per-gang normalization and initial rows are equalities, coupling
// rows are <= rhs. The objective is maximized. The source instance is
// borrowed, not copied: it must outlive the problem.
struct LpProblem {
  const WcgInstance* source = nullptr;
  GsaIndex index;
  int horizon = 0;
  int num_slices = 0;  // horizon + 1
  ColMatrix cols;
  std::vector<double> rhs;
  std::vector<LpRowInfo> rows;
  std::vector<double> objective;

  int var(int t, int j) const { return t * index.triple_count() + j; }
  int num_vars() const { return num_slices * index.triple_count(); }
  int num_rows() const { return static_cast<int>(rhs.size()); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
  double primal_residual = 0.0;  // worst violation over rows and variable boxes
  double dual_gap = 0.0;
  std::int64_t iterations = 0;
  std::vector<int> infeasible_rows;
};

LpProblem build_lp(const WcgInstance& inst);

// Solves the occupancy program. Gangs offering a single action have their
// frequencies forced by the flow rows, so they are substituted out before the
// simplex runs and stitched back into the reported solution; residuals are
// always measured against the full system.
LpSolution solve_lp(const LpProblem& lp);

// Conditional action probabilities per epoch and triple. Within a (gang,
// state) row the frequencies are renormalized; rows with no mass (below
// 1e-10) fall back to the uniform distribution over that gang's actions.
std::vector<std::vector<double>> action_probabilities(const LpProblem& lp,
                                                      const std::vector<double>& x);

// Population-share trajectory implied by a solution: entry [t][j] is
// base_pops[gang(j)] * x_t(j) / total_base_pop, the large-population limit of
// the realized occupancy share.
std::vector<std::vector<double>> deterministic_trajectory(const LpProblem& lp,
                                                          const std::vector<double>& x);

}  // namespace wcg
