#include "wcg/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wcg {
namespace {

// Forward-propagates the initial distribution of a single-action gang; with
// one kernel the flow rows admit exactly one solution.
std::vector<std::vector<double>> forced_distributions(const GangSpec& g,
                                                      const std::vector<double>& init,
                                                      int slices) {
  std::vector<std::vector<double>> dist(slices);
  dist[0] = init;
  for (int t = 1; t < slices; ++t) {
    dist[t].assign(g.num_states, 0.0);
    for (int s = 0; s < g.num_states; ++s) {
      const double mass = dist[t - 1][s];
      if (mass == 0.0) continue;
      const auto& row = g.transitions[0][s];
      for (int s2 = 0; s2 < g.num_states; ++s2)
        if (row[s2] != 0.0) dist[t][s2] += mass * row[s2];
    }
  }
  return dist;
}

}  // namespace

LpProblem build_lp(const WcgInstance& inst) {
  LpProblem lp;
  lp.source = &inst;
  lp.index = GsaIndex(inst);
  lp.horizon = inst.horizon;
  lp.num_slices = inst.horizon + 1;

  const GsaIndex& idx = lp.index;
  const int T = lp.horizon;
  const int I = inst.num_gangs();
  const int L = inst.num_constraints();
  const int P = idx.pair_count();
  const int flow_base = 0;
  const int norm_base = T * P;
  const int init_base = norm_base + lp.num_slices * I;
  const int coupling_base = init_base + P;
  const int num_rows = coupling_base + lp.num_slices * L;

  lp.rhs.assign(num_rows, 0.0);
  lp.rows.resize(num_rows);
  for (int t = 0; t < T; ++t)
    for (int p = 0; p < P; ++p) {
      const PairRef pr = idx.pair_at(p);
      lp.rows[flow_base + t * P + p] = {RowType::Flow, t, pr.gang, pr.state, 0};
    }
  for (int t = 0; t < lp.num_slices; ++t)
    for (int i = 0; i < I; ++i) {
      lp.rows[norm_base + t * I + i] = {RowType::Normalization, t, i, 0, 0};
      lp.rhs[norm_base + t * I + i] = 1.0;
    }
  for (int p = 0; p < P; ++p) {
    const PairRef pr = idx.pair_at(p);
    lp.rows[init_base + p] = {RowType::Initial, 0, pr.gang, pr.state, 0};
    lp.rhs[init_base + p] = inst.init_dist[pr.gang][pr.state];
  }
  for (int t = 0; t < lp.num_slices; ++t)
    for (int ell = 0; ell < L; ++ell)
      lp.rows[coupling_base + t * L + ell] = {RowType::Coupling, t, 0, 0, ell};

  lp.cols.rows = num_rows;
  lp.objective.assign(lp.num_vars(), 0.0);
  std::vector<std::pair<int, double>> entries;
  for (int t = 0; t < lp.num_slices; ++t) {
    for (int j = 0; j < idx.triple_count(); ++j) {
      const TripleRef ref = idx.triple_at(j);
      const GangSpec& g = inst.gangs[ref.gang];
      entries.clear();
      if (t < T) {
        const auto& row = g.transitions[ref.action][ref.state];
        for (int s2 = 0; s2 < g.num_states; ++s2)
          if (row[s2] != 0.0)
            entries.emplace_back(flow_base + t * P + idx.pair(ref.gang, s2), row[s2]);
      }
      if (t > 0) entries.emplace_back(flow_base + (t - 1) * P + idx.pair(ref.gang, ref.state), -1.0);
      entries.emplace_back(norm_base + t * I + ref.gang, 1.0);
      if (t == 0) entries.emplace_back(init_base + idx.pair(ref.gang, ref.state), 1.0);
      const double pop = static_cast<double>(inst.base_pops[ref.gang]);
      for (int ell = 0; ell < L; ++ell) {
        const double f = inst.constraints[ell].per_gang[ref.gang][ref.state][ref.action];
        if (f != 0.0) entries.emplace_back(coupling_base + t * L + ell, pop * f);
      }
      std::sort(entries.begin(), entries.end());
      lp.cols.add_column(entries);
      lp.objective[lp.var(t, j)] = pop * g.rewards[ref.state][ref.action];
    }
  }
  return lp;
}

LpSolution solve_lp(const LpProblem& lp) {
  if (lp.source == nullptr) throw std::logic_error("LpProblem lost its instance");
  const WcgInstance& inst = *lp.source;
  const GsaIndex& idx = lp.index;
  const int I = inst.num_gangs();
  const int L = inst.num_constraints();
  const int slices = lp.num_slices;

  LpSolution sol;
  sol.x.assign(lp.num_vars(), 0.0);

  // substitute out gangs whose single kernel pins the whole trajectory
  std::vector<bool> forced(I, false);
  double obj_const = 0.0;
  std::vector<std::vector<double>> coupling_shift(slices, std::vector<double>(L, 0.0));
  for (int i = 0; i < I; ++i) {
    if (inst.gangs[i].num_actions != 1) continue;
    forced[i] = true;
    const auto dist = forced_distributions(inst.gangs[i], inst.init_dist[i], slices);
    const double pop = static_cast<double>(inst.base_pops[i]);
    for (int t = 0; t < slices; ++t)
      for (int s = 0; s < inst.gangs[i].num_states; ++s) {
        const double v = dist[t][s];
        sol.x[lp.var(t, idx.triple(i, s, 0))] = v;
        if (v == 0.0) continue;
        obj_const += pop * inst.gangs[i].rewards[s][0] * v;
        for (int ell = 0; ell < L; ++ell)
          coupling_shift[t][ell] += pop * inst.constraints[ell].per_gang[i][s][0] * v;
      }
  }

  // free triples keep their gang/state/action identity through this map
  std::vector<int> free_triples;
  for (int j = 0; j < idx.triple_count(); ++j)
    if (!forced[idx.triple_at(j).gang]) free_triples.push_back(j);
  std::vector<int> free_gangs;
  for (int i = 0; i < I; ++i)
    if (!forced[i]) free_gangs.push_back(i);

  if (free_triples.empty()) {
    // nothing left to optimize; the coupling rows decide feasibility alone
    sol.status = LpStatus::Optimal;
    for (int t = 0; t < slices; ++t)
      for (int ell = 0; ell < L; ++ell)
        if (coupling_shift[t][ell] > 1e-9) {
          sol.status = LpStatus::Infeasible;
          sol.infeasible_rows.push_back(static_cast<int>(lp.rhs.size()) - slices * L + t * L + ell);
        }
    sol.objective = obj_const;
  } else {
    std::vector<int> gang_slot(I, -1);
    for (size_t k = 0; k < free_gangs.size(); ++k) gang_slot[free_gangs[k]] = static_cast<int>(k);
    std::vector<int> pair_slot(idx.pair_count(), -1);
    int free_pairs = 0;
    for (int p = 0; p < idx.pair_count(); ++p)
      if (!forced[idx.pair_at(p).gang]) pair_slot[p] = free_pairs++;

    const int T = lp.horizon;
    const int nI = static_cast<int>(free_gangs.size());
    const int nJ = static_cast<int>(free_triples.size());
    const int flow_base = 0;
    const int norm_base = T * free_pairs;
    const int init_base = norm_base + slices * nI;
    const int coupling_base = init_base + free_pairs;
    const int rows = coupling_base + slices * L;

    ColMatrix A;
    A.rows = rows;
    std::vector<double> b(rows, 0.0), c, lo, up;
    for (int t = 0; t < slices; ++t)
      for (int i2 = 0; i2 < nI; ++i2) b[norm_base + t * nI + i2] = 1.0;
    for (int p = 0; p < idx.pair_count(); ++p)
      if (pair_slot[p] >= 0)
        b[init_base + pair_slot[p]] = inst.init_dist[idx.pair_at(p).gang][idx.pair_at(p).state];
    for (int t = 0; t < slices; ++t)
      for (int ell = 0; ell < L; ++ell)
        b[coupling_base + t * L + ell] = -coupling_shift[t][ell];

    std::vector<std::pair<int, double>> entries;
    for (int t = 0; t < slices; ++t) {
      for (int jj = 0; jj < nJ; ++jj) {
        const int j = free_triples[jj];
        const TripleRef ref = idx.triple_at(j);
        const GangSpec& g = inst.gangs[ref.gang];
        entries.clear();
        if (t < T) {
          const auto& row = g.transitions[ref.action][ref.state];
          for (int s2 = 0; s2 < g.num_states; ++s2)
            if (row[s2] != 0.0)
              entries.emplace_back(
                  flow_base + t * free_pairs + pair_slot[idx.pair(ref.gang, s2)], row[s2]);
        }
        if (t > 0)
          entries.emplace_back(
              flow_base + (t - 1) * free_pairs + pair_slot[idx.pair(ref.gang, ref.state)], -1.0);
        entries.emplace_back(norm_base + t * nI + gang_slot[ref.gang], 1.0);
        if (t == 0)
          entries.emplace_back(init_base + pair_slot[idx.pair(ref.gang, ref.state)], 1.0);
        const double pop = static_cast<double>(inst.base_pops[ref.gang]);
        for (int ell = 0; ell < L; ++ell) {
          const double f = inst.constraints[ell].per_gang[ref.gang][ref.state][ref.action];
          if (f != 0.0) entries.emplace_back(coupling_base + t * L + ell, pop * f);
        }
        std::sort(entries.begin(), entries.end());
        A.add_column(entries);
        // simplex minimizes, the occupancy objective maximizes
        c.push_back(-lp.objective[lp.var(t, j)]);
        lo.push_back(0.0);
        up.push_back(1.0);
      }
    }
    for (int r = coupling_base; r < rows; ++r) {
      A.add_column({{r, 1.0}});
      c.push_back(0.0);
      lo.push_back(0.0);
      up.push_back(kInf);
    }

    // The optimum is often a whole face, and which vertex comes back matters
    // downstream: rounded dispatch follows a plan badly when leaving a gang's
    // bottom state depends on a thin fractional flow that floors to nothing.
    // Prefer the optimal vertex carrying the least mass in bottom states.
    std::vector<double> tie(c.size(), 0.0);
    for (int t = 0; t < slices; ++t)
      for (int jj = 0; jj < nJ; ++jj)
        if (idx.triple_at(free_triples[jj]).state == 0) tie[t * nJ + jj] = 1.0;
    SimplexOptions sopts;
    sopts.tie_break = &tie;

    const SimplexResult sres = solve_simplex(A, b, c, lo, up, sopts);
    sol.iterations = sres.iterations;
    switch (sres.status) {
      case SimplexStatus::Optimal:
        sol.status = LpStatus::Optimal;
        break;
      case SimplexStatus::Infeasible:
        sol.status = LpStatus::Infeasible;
        break;
      case SimplexStatus::Unbounded:
        sol.status = LpStatus::Unbounded;
        break;
      case SimplexStatus::IterationLimit:
        throw std::runtime_error("simplex hit its iteration limit");
    }
    if (sol.status == LpStatus::Infeasible) {
      // translate reduced row ids back to full system ids, best effort
      const int full_rows = lp.num_rows();
      const int full_coupling_base = full_rows - slices * L;
      for (int r : sres.infeasible_rows) {
        if (r >= coupling_base)
          sol.infeasible_rows.push_back(full_coupling_base + (r - coupling_base));
        else
          sol.infeasible_rows.push_back(r);
      }
      return sol;
    }
    if (sol.status != LpStatus::Optimal) return sol;

    for (int t = 0; t < slices; ++t)
      for (int jj = 0; jj < nJ; ++jj)
        sol.x[lp.var(t, free_triples[jj])] = sres.x[t * nJ + jj];
    sol.objective = obj_const - sres.objective;
    const double gap_abs = sres.dual_gap * (1.0 + std::abs(sres.objective));
    sol.dual_gap = gap_abs / (1.0 + std::abs(sol.objective));
  }

  // residuals against the full, unreduced system
  std::vector<double> act(lp.num_rows(), 0.0);
  for (int v = 0; v < lp.num_vars(); ++v) {
    const double xv = sol.x[v];
    if (xv == 0.0) continue;
    for (int k = lp.cols.col_start[v]; k < lp.cols.col_start[v + 1]; ++k)
      act[lp.cols.row_idx[k]] += lp.cols.value[k] * xv;
  }
  double worst = 0.0;
  for (int r = 0; r < lp.num_rows(); ++r) {
    const double gap = act[r] - lp.rhs[r];
    worst = std::max(worst, lp.rows[r].type == RowType::Coupling ? gap : std::abs(gap));
  }
  for (double xv : sol.x) worst = std::max({worst, -xv, xv - 1.0});
  sol.primal_residual = worst;
  return sol;
}

std::vector<std::vector<double>> action_probabilities(const LpProblem& lp,
                                                      const std::vector<double>& x) {
  const GsaIndex& idx = lp.index;
  std::vector<std::vector<double>> alpha(lp.num_slices,
                                         std::vector<double>(idx.triple_count(), 0.0));
  for (int t = 0; t < lp.num_slices; ++t) {
    for (int p = 0; p < idx.pair_count(); ++p) {
      const PairRef pr = idx.pair_at(p);
      const int na = idx.actions_of(pr.gang);
      const int j0 = idx.triple(pr.gang, pr.state, 0);
      double denom = 0.0;
      for (int a = 0; a < na; ++a) denom += std::max(0.0, x[lp.var(t, j0 + a)]);
      if (denom > 1e-10) {
        for (int a = 0; a < na; ++a)
          alpha[t][j0 + a] = std::max(0.0, x[lp.var(t, j0 + a)]) / denom;
      } else {
        for (int a = 0; a < na; ++a) alpha[t][j0 + a] = 1.0 / static_cast<double>(na);
      }
    }
  }
  return alpha;
}

std::vector<std::vector<double>> deterministic_trajectory(const LpProblem& lp,
                                                          const std::vector<double>& x) {
  const WcgInstance& inst = *lp.source;
  const GsaIndex& idx = lp.index;
  const double total = static_cast<double>(inst.total_base_pop());
  std::vector<std::vector<double>> z(lp.num_slices, std::vector<double>(idx.triple_count(), 0.0));
  for (int t = 0; t < lp.num_slices; ++t)
    for (int j = 0; j < idx.triple_count(); ++j)
      z[t][j] = static_cast<double>(inst.base_pops[idx.triple_at(j).gang]) * x[lp.var(t, j)] / total;
  return z;
}

}  // namespace wcg
