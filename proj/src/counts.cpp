#include "wcg/counts.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wcg {

double constraint_lhs(const WcgInstance& inst, const GsaIndex& idx,
                      const OccupancyCounts& occ, int ell) {
  const auto& table = inst.constraints[ell].per_gang;
  double weighted = 0.0;
  for (int j = 0; j < idx.triple_count(); ++j) {
    const std::int64_t c = occ.counts[j];
    if (c == 0) continue;
    const TripleRef ref = idx.triple_at(j);
    weighted += static_cast<double>(inst.base_pops[ref.gang]) *
                table[ref.gang][ref.state][ref.action] * static_cast<double>(c);
  }
  return weighted / static_cast<double>(occ.total(inst));
}

std::vector<ConstraintCheck> check_hard_constraints(const WcgInstance& inst,
                                                    const GsaIndex& idx,
                                                    const OccupancyCounts& occ) {
  std::vector<ConstraintCheck> out(inst.num_constraints());
  for (int ell = 0; ell < inst.num_constraints(); ++ell) {
    const double lhs = constraint_lhs(inst, idx, occ, ell);
    out[ell] = {ell, lhs, lhs <= kHardConstraintTol};
  }
  return out;
}

StateCounts scale_initial_counts(const WcgInstance& inst, const GsaIndex& idx,
                                 std::int64_t h) {
  StateCounts out;
  out.h = h;
  out.counts.assign(idx.pair_count(), 0);
  for (int i = 0; i < inst.num_gangs(); ++i) {
    const int ns = inst.gangs[i].num_states;
    const std::int64_t pop = h * inst.base_pops[i];
    std::vector<double> frac(ns);
    std::int64_t assigned = 0;
    for (int s = 0; s < ns; ++s) {
      const double target = static_cast<double>(pop) * inst.init_dist[i][s];
      // Nudge before flooring so targets that are integers up to round-off
      // do not lose a whole seat.
      auto base = static_cast<std::int64_t>(std::floor(target + 1e-9));
      base = std::min(base, pop);
      out.counts[idx.pair(i, s)] = base;
      frac[s] = target - static_cast<double>(base);
      assigned += base;
    }
    std::vector<int> order(ns);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return frac[a] > frac[b]; });
    for (int k = 0; assigned < pop; ++k) {
      out.counts[idx.pair(i, order[k % ns])] += 1;
      ++assigned;
    }
  }
  return out;
}

}  // namespace wcg
