#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace wcg {

// Column-compressed sparse matrix; columns are appended in order.
struct ColMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> col_start{0};
  std::vector<int> row_idx;
  std::vector<double> value;

  void add_column(const std::vector<std::pair<int, double>>& entries) {
    for (const auto& [r, v] : entries) {
      if (v == 0.0) continue;
      row_idx.push_back(r);
      value.push_back(v);
    }
    col_start.push_back(static_cast<int>(row_idx.size()));
    ++cols;
  }
};

enum class SimplexStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct SimplexOptions {
  double feas_tol = 1e-9;
  double opt_tol = 1e-9;
  double pivot_tol = 1e-10;
  std::int64_t max_iters = 0;   // 0 = derive from problem size
  int refactor_interval = 128;  // dense reinversion cadence

  // Optional secondary cost (one entry per structural column). After the main
  // objective is optimal, columns priced off the optimal face are fixed at
  // their bounds and this cost is minimized over the face that remains. The
  // reported objective, duals, and gap still refer to the main cost.
  const std::vector<double>* tie_break = nullptr;
};

struct SimplexResult {
  SimplexStatus status = SimplexStatus::IterationLimit;
  double objective = 0.0;
  std::vector<double> x;
  std::vector<double> row_dual;
  std::vector<double> reduced_cost;
  double dual_gap = 0.0;
  std::int64_t iterations = 0;
  std::int64_t degenerate_pivots = 0;
  std::vector<int> infeasible_rows;  // rows kept infeasible by phase one
};

// Minimizes c'x subject to A x = b and lower <= x <= upper (upper entries may
// be +infinity). Two-phase revised simplex over the bounded variables: Dantzig
// pricing, switching to Bland's rule after 10 * rows consecutive degenerate
// pivots, with a dense reinversion of the basis at a fixed cadence.
SimplexResult solve_simplex(const ColMatrix& A, const std::vector<double>& b,
                            const std::vector<double>& c,
                            const std::vector<double>& lower,
                            const std::vector<double>& upper,
                            const SimplexOptions& opts = {});

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace wcg
