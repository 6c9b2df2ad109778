#pragma once

#include <cstdint>
#include <vector>

#include "wcg/instance.hpp"

namespace wcg {

// Census over (gang, state) pairs: how many members of gang i sit in state s.
struct StateCounts {
  std::int64_t h = 1;
  std::vector<std::int64_t> counts;  // indexed by GsaIndex pair order

  std::int64_t at(const GsaIndex& idx, int gang, int state) const {
    return counts[idx.pair(gang, state)];
  }
};

// Joint state-action occupancy at one epoch, stored as exact member counts
// per (gang, state, action) triple. The normalized occupancy is
// counts / (h * total_base_pop); counts within gang i always sum to h * base_pops[i].
struct OccupancyCounts {
  std::int64_t h = 1;
  int t = 0;
  std::vector<std::int64_t> counts;  // indexed by GsaIndex triple order

  std::int64_t total(const WcgInstance& inst) const { return h * inst.total_base_pop(); }
};

struct ConstraintCheck {
  int ell = 0;
  double lhs = 0.0;  // population-weighted, normalized by h * total_base_pop
  bool satisfied = false;
};

// Tolerance for the hard per-epoch coupling check (absolute, on the
// normalized left-hand side).
inline constexpr double kHardConstraintTol = 1e-9;

// Normalized coupling left-hand side
//   L_ell = sum_{(i,s,a)} base_pops[i] * f_{i,ell}(s,a) * counts(i,s,a) / (h * sum_j base_pops[j]).
double constraint_lhs(const WcgInstance& inst, const GsaIndex& idx,
                      const OccupancyCounts& occ, int ell);

// Evaluates every coupling constraint at one epoch's occupancy.
std::vector<ConstraintCheck> check_hard_constraints(const WcgInstance& inst,
                                                    const GsaIndex& idx,
                                                    const OccupancyCounts& occ);

// Apportions h * base_pops[i] members of each gang over states to match
// init_dist[i] as closely as integers allow: floor targets first, then the
// leftover seats go to the largest fractional remainders, ties to the lower
// state index.
StateCounts scale_initial_counts(const WcgInstance& inst, const GsaIndex& idx,
                                 std::int64_t h);

}  // namespace wcg
