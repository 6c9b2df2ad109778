#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wcg/counts.hpp"
#include "wcg/instance.hpp"

namespace wcg {

// Raised when decision adaption runs out of movable mass while a coupling
// constraint is still violated; cannot happen when the common-minimizer
// feasibility assumption holds at the realized census.
class AdaptionExhausted : public std::runtime_error {
 public:
  AdaptionExhausted(int ell, std::vector<double> residuals)
      : std::runtime_error("decision adaption exhausted on constraint " + std::to_string(ell)),
        constraint(ell),
        residual_lhs(std::move(residuals)) {}

  int constraint;
  std::vector<double> residual_lhs;  // normalized coupling LHS per constraint
};

struct AdaptionStats {
  std::int64_t moved_total = 0;  // members rerouted to cheaper actions
  int constraints_hit = 0;       // coupling rows that needed repair
  bool adapted() const { return moved_total > 0; }
};

// Proportional rounding step: each non-anchor action of a (gang, state) row
// receives floor(alpha * row census) members, the anchor action absorbs the
// remainder. Marginals match the census exactly.
OccupancyCounts proportional_decide(const WcgInstance& inst, const GsaIndex& idx,
                                    const StateCounts& census,
                                    const std::vector<double>& alpha_t,
                                    const std::vector<std::vector<int>>& anchor, int t);

// Myopic decision: every member of a (gang, state) row takes the action with
// the highest population-weighted immediate reward, ties to the lowest index.
OccupancyCounts greedy_decide(const WcgInstance& inst, const GsaIndex& idx,
                              const StateCounts& census, int t);

// Per-triple ordering key used when the myopic decision is adapted.
std::vector<double> greedy_order_key(const WcgInstance& inst, const GsaIndex& idx);

// Repairs an occupancy in place until every coupling row is satisfied.
// Triples are visited by ascending order_key (ties by flat index), constraints
// by ascending index; mass moves down chains of strictly cheaper actions, the
// chain anchored at the row's common minimizer, in whole-member increments.
AdaptionStats adapt_decision(const WcgInstance& inst, const GsaIndex& idx,
                             OccupancyCounts& occ, const std::vector<double>& order_key,
                             const std::vector<std::vector<int>>& anchor);

// Waterfilling activation shares: walks the ranking, activating
// min{y, remaining budget} of each state's mass; returns per-state activated
// fractions (activated mass / y, zero where y is zero). budget must lie in
// (0, 1); total activated mass equals min{budget, sum y} exactly.
std::vector<double> priority_allocation(const std::vector<double>& y,
                                        const std::vector<int>& ranking, double budget);

// Integer counterpart used during episodes: activation budget is
// floor(budget * population) members, filled greedily down the ranking of
// (gang, state) pairs. Every gang must offer exactly two actions, action 1
// being the active one.
OccupancyCounts priority_decide(const WcgInstance& inst, const GsaIndex& idx,
                                const StateCounts& census, const std::vector<int>& ranking,
                                double budget, int t);

// Expands an occupancy into per-member action assignments: members of a
// (gang, state) row are numbered in ascending order and receive actions in
// ascending action order. Entry [p] lists the actions for pair p.
std::vector<std::vector<int>> realize_actions(const GsaIndex& idx, const OccupancyCounts& occ);

}  // namespace wcg
