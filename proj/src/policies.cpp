#include "wcg/policies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wcg {
namespace {

// weighted coupling sums in member-count units, one per constraint
std::vector<double> weighted_lhs_counts(const WcgInstance& inst, const GsaIndex& idx,
                                        const OccupancyCounts& occ) {
  std::vector<double> lhs(inst.num_constraints(), 0.0);
  for (int j = 0; j < idx.triple_count(); ++j) {
    const std::int64_t c = occ.counts[j];
    if (c == 0) continue;
    const TripleRef ref = idx.triple_at(j);
    const double w = static_cast<double>(inst.base_pops[ref.gang]) * static_cast<double>(c);
    for (int ell = 0; ell < inst.num_constraints(); ++ell)
      lhs[ell] += w * inst.constraints[ell].per_gang[ref.gang][ref.state][ref.action];
  }
  return lhs;
}

}  // namespace

OccupancyCounts proportional_decide(const WcgInstance& inst, const GsaIndex& idx,
                                    const StateCounts& census,
                                    const std::vector<double>& alpha_t,
                                    const std::vector<std::vector<int>>& anchor, int t) {
  OccupancyCounts occ;
  occ.h = census.h;
  occ.t = t;
  occ.counts.assign(idx.triple_count(), 0);
  for (int p = 0; p < idx.pair_count(); ++p) {
    const std::int64_t y = census.counts[p];
    if (y == 0) continue;
    const PairRef pr = idx.pair_at(p);
    const int na = idx.actions_of(pr.gang);
    const int j0 = idx.triple(pr.gang, pr.state, 0);
    int a0 = anchor[pr.gang][pr.state];
    if (a0 < 0) a0 = 0;
    std::int64_t assigned = 0;
    for (int a = 0; a < na; ++a) {
      if (a == a0) continue;
      const auto share = static_cast<std::int64_t>(
          std::floor(alpha_t[j0 + a] * static_cast<double>(y) + 1e-9));
      occ.counts[j0 + a] = share;
      assigned += share;
    }
    occ.counts[j0 + a0] = y - assigned;
  }
  return occ;
}

OccupancyCounts greedy_decide(const WcgInstance& inst, const GsaIndex& idx,
                              const StateCounts& census, int t) {
  OccupancyCounts occ;
  occ.h = census.h;
  occ.t = t;
  occ.counts.assign(idx.triple_count(), 0);
  for (int p = 0; p < idx.pair_count(); ++p) {
    const std::int64_t y = census.counts[p];
    if (y == 0) continue;
    const PairRef pr = idx.pair_at(p);
    const auto& row = inst.gangs[pr.gang].rewards[pr.state];
    int best = 0;
    for (int a = 1; a < idx.actions_of(pr.gang); ++a)
      if (row[a] > row[best]) best = a;
    occ.counts[idx.triple(pr.gang, pr.state, best)] = y;
  }
  return occ;
}

std::vector<double> greedy_order_key(const WcgInstance& inst, const GsaIndex& idx) {
  std::vector<double> key(idx.triple_count(), 0.0);
  for (int j = 0; j < idx.triple_count(); ++j) {
    const TripleRef ref = idx.triple_at(j);
    key[j] = static_cast<double>(inst.base_pops[ref.gang]) *
             inst.gangs[ref.gang].rewards[ref.state][ref.action];
  }
  return key;
}

AdaptionStats adapt_decision(const WcgInstance& inst, const GsaIndex& idx, OccupancyCounts& occ,
                             const std::vector<double>& order_key,
                             const std::vector<std::vector<int>>& anchor) {
  AdaptionStats stats;
  const int L = inst.num_constraints();
  if (L == 0) return stats;

  const double scale = static_cast<double>(occ.total(inst));
  const double tol = kHardConstraintTol * scale;
  std::vector<double> lhs = weighted_lhs_counts(inst, idx, occ);

  std::vector<int> order(idx.triple_count());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return order_key[a] < order_key[b]; });

  for (int ell = 0; ell < L; ++ell) {
    if (lhs[ell] <= tol) continue;
    ++stats.constraints_hit;
    const auto& table = inst.constraints[ell].per_gang;

    for (int j : order) {
      if (lhs[ell] <= tol) break;
      if (occ.counts[j] == 0) continue;
      const TripleRef ref = idx.triple_at(j);
      const int a0 = anchor[ref.gang][ref.state];
      if (a0 < 0 || a0 == ref.action) continue;
      const auto& frow = table[ref.gang][ref.state];

      // actions strictly cheaper than a(j) under the active constraint,
      // anchor first, the rest by ascending cost then index
      std::vector<int> chain;
      chain.push_back(a0);
      for (int a = 0; a < idx.actions_of(ref.gang); ++a)
        if (a != a0 && frow[a] < frow[ref.action]) chain.push_back(a);
      if (chain.size() < 2 && frow[a0] >= frow[ref.action]) continue;
      std::stable_sort(chain.begin() + 1, chain.end(), [&](int a, int b) {
        if (frow[a] != frow[b]) return frow[a] < frow[b];
        return a < b;
      });
      chain.push_back(ref.action);

      // the whole ladder must be monotone under every constraint; otherwise
      // fall back to the direct anchor hop, which always is
      bool monotone = true;
      for (size_t k = 0; k + 1 < chain.size() && monotone; ++k)
        for (int l2 = 0; l2 < L; ++l2) {
          const auto& other = inst.constraints[l2].per_gang[ref.gang][ref.state];
          if (other[chain[k]] > other[chain[k + 1]] + 1e-12) {
            monotone = false;
            break;
          }
        }
      if (!monotone) chain = {a0, ref.action};

      const double pop = static_cast<double>(inst.base_pops[ref.gang]);
      for (int m = static_cast<int>(chain.size()) - 2; m >= 0; --m) {
        if (lhs[ell] <= tol) break;
        const int dst = chain[m];
        const int src = chain[m + 1];
        const double delta_f = frow[src] - frow[dst];
        if (delta_f <= 1e-15) continue;
        const int src_triple = idx.triple(ref.gang, ref.state, src);
        const std::int64_t avail = occ.counts[src_triple];
        if (avail == 0) continue;
        const auto need =
            static_cast<std::int64_t>(std::ceil(lhs[ell] / (pop * delta_f) - 1e-12));
        const std::int64_t moved = std::min(avail, std::max<std::int64_t>(need, 1));
        occ.counts[src_triple] -= moved;
        occ.counts[idx.triple(ref.gang, ref.state, dst)] += moved;
        const double dm = pop * static_cast<double>(moved);
        for (int l2 = 0; l2 < L; ++l2) {
          const auto& other = inst.constraints[l2].per_gang[ref.gang][ref.state];
          lhs[l2] += dm * (other[dst] - other[src]);
        }
        stats.moved_total += moved;
      }
    }

    if (lhs[ell] > tol) {
      std::vector<double> residual(L);
      for (int l2 = 0; l2 < L; ++l2) residual[l2] = lhs[l2] / scale;
      throw AdaptionExhausted(ell, std::move(residual));
    }
  }
  return stats;
}

std::vector<double> priority_allocation(const std::vector<double>& y,
                                        const std::vector<int>& ranking, double budget) {
  if (!(budget > 0.0 && budget < 1.0))
    throw std::invalid_argument("activation budget must lie strictly between 0 and 1");
  if (ranking.size() != y.size())
    throw std::invalid_argument("ranking length does not match state count");
  std::vector<bool> seen(y.size(), false);
  for (int s : ranking) {
    if (s < 0 || s >= static_cast<int>(y.size()) || seen[s])
      throw std::invalid_argument("ranking is not a permutation of the states");
    seen[s] = true;
  }
  std::vector<double> frac(y.size(), 0.0);
  double remaining = budget;
  for (int s : ranking) {
    const double mass = std::min(y[s], std::max(remaining, 0.0));
    frac[s] = y[s] > 0.0 ? mass / y[s] : 0.0;
    remaining -= mass;
  }
  return frac;
}

OccupancyCounts priority_decide(const WcgInstance& inst, const GsaIndex& idx,
                                const StateCounts& census, const std::vector<int>& ranking,
                                double budget, int t) {
  if (!(budget > 0.0 && budget < 1.0))
    throw std::invalid_argument("activation budget must lie strictly between 0 and 1");
  for (int i = 0; i < inst.num_gangs(); ++i)
    if (inst.gangs[i].num_actions != 2)
      throw std::invalid_argument("priority policy needs exactly two actions per gang");
  if (static_cast<int>(ranking.size()) != idx.pair_count())
    throw std::invalid_argument("ranking length does not match the number of (gang, state) pairs");

  OccupancyCounts occ;
  occ.h = census.h;
  occ.t = t;
  occ.counts.assign(idx.triple_count(), 0);
  const double total = static_cast<double>(census.h * inst.total_base_pop());
  auto remaining = static_cast<std::int64_t>(std::floor(budget * total + 1e-9));
  for (int p : ranking) {
    const PairRef pr = idx.pair_at(p);
    const std::int64_t y = census.counts[p];
    const std::int64_t active = std::min(y, std::max<std::int64_t>(remaining, 0));
    occ.counts[idx.triple(pr.gang, pr.state, 1)] = active;
    occ.counts[idx.triple(pr.gang, pr.state, 0)] = y - active;
    remaining -= active;
  }
  return occ;
}

std::vector<std::vector<int>> realize_actions(const GsaIndex& idx, const OccupancyCounts& occ) {
  std::vector<std::vector<int>> out(idx.pair_count());
  for (int p = 0; p < idx.pair_count(); ++p) {
    const PairRef pr = idx.pair_at(p);
    auto& members = out[p];
    for (int a = 0; a < idx.actions_of(pr.gang); ++a) {
      const std::int64_t c = occ.counts[idx.triple(pr.gang, pr.state, a)];
      members.insert(members.end(), static_cast<size_t>(c), a);
    }
  }
  return out;
}

}  // namespace wcg
