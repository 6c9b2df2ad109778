#include "wcg/simulator.hpp"

#include <cmath>

#include "wcg/rng.hpp"
#include "wcg/validate.hpp"

namespace wcg {

const char* policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Fab: return "fab";
    case PolicyKind::LpApprox: return "lp-approx";
    case PolicyKind::Greedy: return "greedy";
    case PolicyKind::Priority: return "priority";
  }
  return "?";
}

PolicyKind policy_from_name(const std::string& name) {
  if (name == "fab") return PolicyKind::Fab;
  if (name == "lp-approx") return PolicyKind::LpApprox;
  if (name == "greedy") return PolicyKind::Greedy;
  if (name == "priority") return PolicyKind::Priority;
  throw std::invalid_argument("unknown policy: " + name);
}

PolicyContext make_policy_context(const WcgInstance& inst) {
  PolicyContext ctx;
  ctx.inst = &inst;
  ctx.idx = GsaIndex(inst);
  ctx.anchor = common_min_actions(inst);
  ctx.greedy_key = greedy_order_key(inst, ctx.idx);
  return ctx;
}

PolicyContext make_policy_context(const LpProblem& lp, const LpSolution& sol) {
  PolicyContext ctx = make_policy_context(*lp.source);
  ctx.alpha = action_probabilities(lp, sol.x);
  ctx.reference = deterministic_trajectory(lp, sol.x);
  ctx.gamma_star = sol.objective;
  return ctx;
}

EpisodeResult run_episode(const PolicyContext& ctx, const PolicySpec& policy, std::int64_t h,
                          std::uint64_t seed, const EpisodeOptions& opts) {
  const WcgInstance& inst = *ctx.inst;
  const GsaIndex& idx = ctx.idx;
  const int T = inst.horizon;
  const bool uses_alpha =
      policy.kind == PolicyKind::Fab || policy.kind == PolicyKind::LpApprox;
  if (uses_alpha && static_cast<int>(ctx.alpha.size()) != T + 1)
    throw std::logic_error("policy context carries no action probabilities");

  EpisodeResult res;
  std::mt19937_64 rng(seed);
  StateCounts census = scale_initial_counts(inst, idx, h);
  const double scale = static_cast<double>(h * inst.total_base_pop());
  const bool has_reference = static_cast<int>(ctx.reference.size()) == T + 1;
  if (has_reference) res.max_deviation = 0.0;
  if (uses_alpha) res.alpha_deviation = 0.0;
  res.slack.resize(T + 1);

  std::vector<double> kernel_row;
  for (int t = 0; t <= T; ++t) {
    OccupancyCounts occ;
    switch (policy.kind) {
      case PolicyKind::Fab: {
        occ = proportional_decide(inst, idx, census, ctx.alpha[t], ctx.anchor, t);
        const AdaptionStats stats = adapt_decision(inst, idx, occ, ctx.alpha[t], ctx.anchor);
        res.adapted_total += stats.moved_total;
        res.adapted_max_step = std::max(res.adapted_max_step, stats.moved_total);
        break;
      }
      case PolicyKind::LpApprox:
        occ = proportional_decide(inst, idx, census, ctx.alpha[t], ctx.anchor, t);
        break;
      case PolicyKind::Greedy: {
        occ = greedy_decide(inst, idx, census, t);
        const AdaptionStats stats = adapt_decision(inst, idx, occ, ctx.greedy_key, ctx.anchor);
        res.adapted_total += stats.moved_total;
        res.adapted_max_step = std::max(res.adapted_max_step, stats.moved_total);
        break;
      }
      case PolicyKind::Priority:
        occ = priority_decide(inst, idx, census, policy.ranking, policy.budget, t);
        break;
    }

    // rewards accrue at every decision epoch, per-unit-h units
    double step_reward = 0.0;
    for (int j = 0; j < idx.triple_count(); ++j) {
      const std::int64_t c = occ.counts[j];
      if (c == 0) continue;
      const TripleRef ref = idx.triple_at(j);
      step_reward += static_cast<double>(c) * inst.gangs[ref.gang].rewards[ref.state][ref.action];
    }
    res.total_reward += step_reward / static_cast<double>(h);

    if (uses_alpha) {
      for (int j = 0; j < idx.triple_count(); ++j) {
        const std::int64_t y = census.counts[idx.pair_of_triple(j)];
        const double gap =
            std::abs(static_cast<double>(occ.counts[j]) - ctx.alpha[t][j] * static_cast<double>(y));
        res.alpha_deviation = std::max(res.alpha_deviation, gap / scale);
      }
    }
    if (has_reference) {
      for (int j = 0; j < idx.triple_count(); ++j) {
        const double gap =
            std::abs(static_cast<double>(occ.counts[j]) / scale - ctx.reference[t][j]);
        res.max_deviation = std::max(res.max_deviation, gap);
      }
    }

    res.slack[t].resize(inst.num_constraints());
    for (const ConstraintCheck& chk : check_hard_constraints(inst, idx, occ)) {
      res.slack[t][chk.ell] = chk.lhs;
      if (!chk.satisfied && opts.enforce_feasibility)
        throw FeasibilityViolation(t, chk.ell, chk.lhs);
    }

    if (opts.record_trajectory) {
      res.censuses.push_back(census);
      res.occupancies.push_back(occ);
    }

    if (t == T) break;

    StateCounts next;
    next.h = h;
    next.counts.assign(idx.pair_count(), 0);
    for (int j = 0; j < idx.triple_count(); ++j) {
      const std::int64_t c = occ.counts[j];
      if (c == 0) continue;
      const TripleRef ref = idx.triple_at(j);
      kernel_row = inst.gangs[ref.gang].transitions[ref.action][ref.state];
      const std::vector<std::int64_t> draws = multinomial_counts(rng, c, kernel_row);
      for (int s2 = 0; s2 < idx.states_of(ref.gang); ++s2)
        if (draws[s2] != 0) next.counts[idx.pair(ref.gang, s2)] += draws[s2];
    }
    for (int i = 0; i < inst.num_gangs(); ++i) {
      std::int64_t total = 0;
      for (int s = 0; s < idx.states_of(i); ++s) total += next.counts[idx.pair(i, s)];
      if (total != h * inst.base_pops[i])
        throw std::logic_error("census lost members during transition");
    }
    census = std::move(next);
  }
  return res;
}

double max_deviation(const std::vector<OccupancyCounts>& occupancies,
                     const std::vector<std::vector<double>>& reference, double scale) {
  double worst = 0.0;
  for (size_t t = 0; t < occupancies.size() && t < reference.size(); ++t)
    for (size_t j = 0; j < occupancies[t].counts.size(); ++j)
      worst = std::max(worst, std::abs(static_cast<double>(occupancies[t].counts[j]) / scale -
                                       reference[t][j]));
  return worst;
}

SweepPoint monte_carlo(const PolicyContext& ctx, const PolicySpec& policy, std::int64_t h,
                       int reps, std::uint64_t master_seed, double epsilon) {
  SweepPoint pt;
  pt.h = h;
  pt.policy = policy_name(policy.kind);
  pt.reps = reps;
  pt.rewards.reserve(reps);
  int exceed = 0;
  bool any_dev = false;
  for (int r = 0; r < reps; ++r) {
    const EpisodeResult ep = run_episode(ctx, policy, h, child_seed(master_seed, r));
    pt.rewards.push_back(ep.total_reward);
    pt.adapted_totals.push_back(ep.adapted_total);
    if (!std::isnan(ep.max_deviation)) {
      any_dev = true;
      pt.deviations.push_back(ep.max_deviation);
      if (ep.max_deviation > epsilon) ++exceed;
    }
    if (!std::isnan(ep.alpha_deviation)) pt.alpha_devs.push_back(ep.alpha_deviation);
  }
  pt.mean_reward = mean_of(pt.rewards);
  pt.ci_half = ci_half_width(pt.rewards);
  if (!std::isnan(ctx.gamma_star) && ctx.gamma_star != 0.0)
    pt.subopt = (ctx.gamma_star - pt.mean_reward) / ctx.gamma_star;
  if (any_dev) {
    pt.p_hat = static_cast<double>(exceed) / static_cast<double>(reps);
    pt.median_dev = median_of(pt.deviations);
  }
  return pt;
}

LinearFit rate_fit(const std::vector<double>& hs, const std::vector<double>& p_hats) {
  std::vector<double> xs, ys;
  for (size_t k = 0; k < hs.size() && k < p_hats.size(); ++k) {
    const double p = p_hats[k];
    if (!(p > 0.0) || !(p < 1.0)) continue;
    xs.push_back(hs[k]);
    ys.push_back(std::log(p));
  }
  if (xs.size() < 3) return {};
  return least_squares(xs, ys);
}

}  // namespace wcg
