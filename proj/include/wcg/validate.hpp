#pragma once

#include <string>
#include <vector>

#include "wcg/instance.hpp"

namespace wcg {

struct ValidationIssue {
  std::string code;
  std::string message;
};

struct ValidationReport {
  // Structural soundness: shapes, stochastic rows, finite data. Anything in
  // errors makes the instance unusable.
  std::vector<ValidationIssue> errors;
  // Non-fatal findings, including a failed feasibility assumption.
  std::vector<ValidationIssue> warnings;

  double max_row_residual = 0.0;  // worst |row sum - 1| over all kernels

  // Per (gang, state): the lowest-index action that simultaneously minimizes
  // every coupling cost in that row, or -1 when no such action exists.
  std::vector<std::vector<int>> min_actions;
  // True when every row has a common minimizer and the all-minimizer profile
  // is feasible at the initial distribution.
  bool assumption_holds = true;
  std::vector<int> degenerate_gangs;  // gangs offering a single action

  bool ok() const { return errors.empty(); }
};

ValidationReport validate_instance(const WcgInstance& inst);

// The common-minimizer table alone (empty slot = -1), for callers that need
// the policy anchor without a full validation pass.
std::vector<std::vector<int>> common_min_actions(const WcgInstance& inst);

}  // namespace wcg
