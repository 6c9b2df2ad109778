#include "wcg/simplex.hpp"

#include <Eigen/Dense>

#include <cassert>
#include <cmath>
#include <cstdlib>

namespace wcg {
namespace {

enum class VarState : unsigned char { AtLower, AtUpper, Basic };

constexpr double kDegenTol = 1e-12;

struct Core {
  int m = 0;
  int n_real = 0;
  int n_total = 0;  // structural plus one artificial per row
  const ColMatrix* A = nullptr;
  std::vector<double> b;
  std::vector<double> art_sign;
  std::vector<double> lo, up, cost;
  std::vector<VarState> state;
  std::vector<int> basic;
  std::vector<double> x;
  Eigen::MatrixXd binv;

  bool is_artificial(int j) const { return j >= n_real; }

  template <typename Fn>
  void for_column(int j, Fn&& fn) const {
    if (j < n_real) {
      for (int k = A->col_start[j]; k < A->col_start[j + 1]; ++k)
        fn(A->row_idx[k], A->value[k]);
    } else {
      fn(j - n_real, art_sign[j - n_real]);
    }
  }

  double column_dot(const Eigen::VectorXd& y, int j) const {
    double acc = 0.0;
    for_column(j, [&](int r, double v) { acc += y[r] * v; });
    return acc;
  }

  Eigen::VectorXd ftran(int j) const {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
    for_column(j, [&](int r, double v) { w += v * binv.col(r); });
    return w;
  }

  void refactor() {
    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(m, m);
    for (int k = 0; k < m; ++k) {
      const int j = basic[k];
      for_column(j, [&](int r, double v) { basis(r, k) = v; });
    }
    binv = Eigen::PartialPivLU<Eigen::MatrixXd>(basis).inverse();
    recompute_basic_values();
  }

  void recompute_basic_values() {
    Eigen::VectorXd rhs(m);
    for (int r = 0; r < m; ++r) rhs[r] = b[r];
    for (int j = 0; j < n_total; ++j) {
      if (state[j] == VarState::Basic || x[j] == 0.0) continue;
      const double v = x[j];
      for_column(j, [&](int r, double coef) { rhs[r] -= coef * v; });
    }
    Eigen::VectorXd xb = binv * rhs;
    for (int k = 0; k < m; ++k) {
      double v = xb[k];
      const int j = basic[k];
      // squash round-off that strays just outside the box
      if (v < lo[j] && v > lo[j] - 1e-9) v = lo[j];
      if (v > up[j] && v < up[j] + 1e-9) v = up[j];
      x[j] = v;
    }
  }
};

struct PhaseOutcome {
  bool optimal = false;
  bool unbounded = false;
  bool iteration_limit = false;
};

PhaseOutcome run_phase(Core& core, const SimplexOptions& opts, std::int64_t max_iters,
                       std::int64_t& iterations, std::int64_t& degenerate) {
  const int m = core.m;
  const std::int64_t bland_after = 10LL * m;
  std::int64_t consec_degen = 0;
  bool bland = false;
  int since_refactor = 0;
  bool fresh_confirm = false;

  Eigen::VectorXd cb(m);
  while (true) {
    if (iterations >= max_iters) return {.iteration_limit = true};

    for (int k = 0; k < m; ++k) cb[k] = core.cost[core.basic[k]];
    Eigen::VectorXd y = core.binv.transpose() * cb;

    int entering = -1;
    double best_viol = opts.opt_tol;
    for (int j = 0; j < core.n_total; ++j) {
      if (core.state[j] == VarState::Basic || core.up[j] <= core.lo[j]) continue;
      const double d = core.cost[j] - core.column_dot(y, j);
      const double viol = core.state[j] == VarState::AtLower ? -d : d;
      if (viol <= best_viol) continue;
      entering = j;
      if (bland) break;  // first eligible index wins
      best_viol = viol;
    }

    if (entering < 0) {
      // confirm on a fresh factorization before declaring optimality
      if (!fresh_confirm && since_refactor > 0) {
        core.refactor();
        since_refactor = 0;
        fresh_confirm = true;
        continue;
      }
      return {.optimal = true};
    }
    fresh_confirm = false;

    const double sigma = core.state[entering] == VarState::AtLower ? 1.0 : -1.0;
    Eigen::VectorXd w = core.ftran(entering);

    // ratio test: how far can the entering variable travel before a basic
    // variable hits a bound, or it flips to its own opposite bound
    double theta = core.up[entering] - core.lo[entering];  // may be +inf
    int leave_pos = -1;
    bool leave_to_upper = false;
    for (int k = 0; k < m; ++k) {
      const double delta = -sigma * w[k];
      if (std::abs(delta) <= opts.pivot_tol) continue;
      const int j = core.basic[k];
      double limit;
      bool to_upper;
      if (delta < 0.0) {
        limit = (core.x[j] - core.lo[j]) / -delta;
        to_upper = false;
      } else {
        if (core.up[j] == kInf) continue;
        limit = (core.up[j] - core.x[j]) / delta;
        to_upper = true;
      }
      if (limit < 0.0) limit = 0.0;
      bool better = limit < theta - 1e-12;
      if (!better && limit < theta + 1e-12 && leave_pos >= 0) {
        // break ties toward numerical stability, or lowest index under Bland
        better = bland ? core.basic[k] < core.basic[leave_pos]
                       : std::abs(w[k]) > std::abs(w[leave_pos]);
      }
      if (better || leave_pos < 0) {
        if (limit <= theta) {
          theta = limit;
          leave_pos = k;
          leave_to_upper = to_upper;
        }
      }
    }

    if (theta == kInf) return {.unbounded = true};

    ++iterations;
    ++since_refactor;

    // apply the step
    if (theta != 0.0) {
      for (int k = 0; k < m; ++k) {
        const double delta = -sigma * w[k];
        if (delta != 0.0) core.x[core.basic[k]] += theta * delta;
      }
      core.x[entering] += sigma * theta;
    }

    if (leave_pos < 0) {
      // bound-to-bound flip, basis unchanged
      core.state[entering] =
          core.state[entering] == VarState::AtLower ? VarState::AtUpper : VarState::AtLower;
      core.x[entering] =
          core.state[entering] == VarState::AtLower ? core.lo[entering] : core.up[entering];
      consec_degen = 0;
      bland = false;
      continue;
    }

    const int leaving = core.basic[leave_pos];
    core.x[leaving] = leave_to_upper ? core.up[leaving] : core.lo[leaving];
    core.state[leaving] = leave_to_upper ? VarState::AtUpper : VarState::AtLower;
    core.state[entering] = VarState::Basic;
    core.basic[leave_pos] = entering;

    if (theta <= kDegenTol) {
      ++degenerate;
      if (++consec_degen > bland_after) bland = true;
    } else {
      consec_degen = 0;
      bland = false;
    }

    if (since_refactor >= opts.refactor_interval) {
      core.refactor();
      since_refactor = 0;
    } else {
      // product-form update of the dense inverse
      const double piv = w[leave_pos];
      core.binv.row(leave_pos) /= piv;
      for (int k = 0; k < m; ++k) {
        if (k == leave_pos) continue;
        const double f = w[k];
        if (f != 0.0) core.binv.row(k).noalias() -= f * core.binv.row(leave_pos);
      }
    }
  }
}

}  // namespace

SimplexResult solve_simplex(const ColMatrix& A, const std::vector<double>& b,
                            const std::vector<double>& c, const std::vector<double>& lower,
                            const std::vector<double>& upper, const SimplexOptions& opts) {
  const int m = A.rows;
  const int n = A.cols;
  assert(static_cast<int>(b.size()) == m);
  assert(static_cast<int>(c.size()) == n);
  assert(static_cast<int>(lower.size()) == n && static_cast<int>(upper.size()) == n);

  Core core;
  core.m = m;
  core.n_real = n;
  core.n_total = n + m;
  core.A = &A;
  core.b = b;
  core.lo = lower;
  core.up = upper;
  core.lo.resize(core.n_total, 0.0);
  core.up.resize(core.n_total, kInf);
  core.x.assign(core.n_total, 0.0);
  core.state.assign(core.n_total, VarState::AtLower);
  core.basic.resize(m);
  core.art_sign.assign(m, 1.0);

  SimplexResult res;
  res.x.assign(n, 0.0);

  // start every structural variable at its (finite) lower bound
  double residual_scale = 1.0;
  std::vector<double> slack(b);
  for (int j = 0; j < n; ++j) {
    assert(lower[j] > -kInf);
    core.x[j] = lower[j];
    if (lower[j] != 0.0)
      for (int k = A.col_start[j]; k < A.col_start[j + 1]; ++k)
        slack[A.row_idx[k]] -= A.value[k] * lower[j];
  }
  for (int r = 0; r < m; ++r) {
    core.art_sign[r] = slack[r] >= 0.0 ? 1.0 : -1.0;
    const int aj = n + r;
    core.basic[r] = aj;
    core.state[aj] = VarState::Basic;
    core.x[aj] = std::abs(slack[r]);
    residual_scale = std::max(residual_scale, std::abs(b[r]));
  }
  core.binv = Eigen::MatrixXd::Zero(m, m);
  for (int r = 0; r < m; ++r) core.binv(r, r) = core.art_sign[r];

  const std::int64_t max_iters =
      opts.max_iters > 0 ? opts.max_iters : 20000 + 100LL * (m + core.n_total);

  // phase one: drive the artificial variables to zero
  core.cost.assign(core.n_total, 0.0);
  for (int r = 0; r < m; ++r) core.cost[n + r] = 1.0;
  PhaseOutcome ph1 =
      run_phase(core, opts, max_iters, res.iterations, res.degenerate_pivots);
  if (ph1.iteration_limit) {
    res.status = SimplexStatus::IterationLimit;
    return res;
  }
  double infeas = 0.0;
  for (int r = 0; r < m; ++r) infeas += core.x[n + r];
  if (ph1.unbounded || infeas > opts.feas_tol * residual_scale) {
    res.status = SimplexStatus::Infeasible;
    for (int r = 0; r < m; ++r)
      if (core.x[n + r] > opts.feas_tol * residual_scale) res.infeasible_rows.push_back(r);
    for (int j = 0; j < n; ++j) res.x[j] = core.x[j];
    return res;
  }

  // phase two: freeze artificials at zero and optimize the real objective
  for (int r = 0; r < m; ++r) {
    core.up[n + r] = 0.0;
    core.x[n + r] = 0.0;
    if (core.state[n + r] != VarState::Basic) core.state[n + r] = VarState::AtLower;
  }
  core.cost.assign(c.begin(), c.end());
  core.cost.resize(core.n_total, 0.0);
  core.refactor();
  PhaseOutcome ph2 =
      run_phase(core, opts, max_iters, res.iterations, res.degenerate_pivots);
  if (ph2.iteration_limit) {
    res.status = SimplexStatus::IterationLimit;
    return res;
  }
  if (ph2.unbounded) {
    res.status = SimplexStatus::Unbounded;
    return res;
  }

  res.status = SimplexStatus::Optimal;

  // duals and a conservative duality-gap estimate, taken at the optimal basis
  // before any tie-break movement along the optimal face
  Eigen::VectorXd cb(m);
  for (int k = 0; k < m; ++k) cb[k] = core.cost[core.basic[k]];
  Eigen::VectorXd y = core.binv.transpose() * cb;
  res.row_dual.assign(m, 0.0);
  for (int r = 0; r < m; ++r) res.row_dual[r] = y[r];
  res.reduced_cost.assign(n, 0.0);
  double dual_obj = 0.0;
  for (int r = 0; r < m; ++r) dual_obj += y[r] * b[r];
  for (int j = 0; j < n; ++j) {
    const double d = c[j] - core.column_dot(y, j);
    res.reduced_cost[j] = d;
    if (core.state[j] == VarState::Basic) continue;
    if (d > 0.0)
      dual_obj += d * lower[j];
    else
      dual_obj += d * (upper[j] < kInf ? upper[j] : core.x[j]);
  }

  if (opts.tie_break != nullptr) {
    assert(static_cast<int>(opts.tie_break->size()) == n);
    // Nonbasic columns with nonzero reduced cost must stay at their bound in
    // every optimal solution; collapsing their box pins the optimal face.
    // Within it every point keeps the main objective, so whatever run_phase
    // reaches (even on a stalled pass) is accepted.
    for (int j = 0; j < n; ++j) {
      if (core.state[j] == VarState::Basic) continue;
      if (std::abs(res.reduced_cost[j]) > opts.opt_tol)
        core.lo[j] = core.up[j] = core.x[j];
    }
    core.cost.assign(opts.tie_break->begin(), opts.tie_break->end());
    core.cost.resize(core.n_total, 0.0);
    run_phase(core, opts, max_iters, res.iterations, res.degenerate_pivots);
  }

  for (int j = 0; j < n; ++j) res.x[j] = core.x[j];
  res.objective = 0.0;
  for (int j = 0; j < n; ++j) res.objective += c[j] * res.x[j];
  res.dual_gap = std::abs(res.objective - dual_obj) / (1.0 + std::abs(res.objective));
  return res;
}

}  // namespace wcg
