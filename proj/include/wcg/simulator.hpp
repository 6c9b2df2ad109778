#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "wcg/counts.hpp"
#include "wcg/instance.hpp"
#include "wcg/lp.hpp"
#include "wcg/policies.hpp"
#include "wcg/stats.hpp"

namespace wcg {

enum class PolicyKind { Fab, LpApprox, Greedy, Priority };

const char* policy_name(PolicyKind kind);
PolicyKind policy_from_name(const std::string& name);

struct PolicySpec {
  PolicyKind kind = PolicyKind::Fab;
  std::vector<int> ranking;  // Priority: (gang, state) pairs, best first
  double budget = 0.0;       // Priority: activation share in (0, 1)
};

// Everything episodes need that does not depend on h: conditional action
// probabilities and the reference share trajectory from the solved occupancy
// program (empty for policies that do not use them), the per-row anchor
// actions, and the myopic ordering key.
struct PolicyContext {
  const WcgInstance* inst = nullptr;
  GsaIndex idx;
  std::vector<std::vector<double>> alpha;      // [t][triple]
  std::vector<std::vector<double>> reference;  // [t][triple] population shares
  std::vector<std::vector<int>> anchor;
  std::vector<double> greedy_key;
  double gamma_star = std::numeric_limits<double>::quiet_NaN();
};

PolicyContext make_policy_context(const WcgInstance& inst);
PolicyContext make_policy_context(const LpProblem& lp, const LpSolution& sol);

class FeasibilityViolation : public std::runtime_error {
 public:
  FeasibilityViolation(int t_, int ell_, double lhs_)
      : std::runtime_error("coupling constraint " + std::to_string(ell_) +
                           " violated at epoch " + std::to_string(t_) +
                           " (lhs " + std::to_string(lhs_) + ")"),
        t(t_),
        ell(ell_),
        lhs(lhs_) {}
  int t;
  int ell;
  double lhs;
};

struct EpisodeOptions {
  bool record_trajectory = false;  // keep censuses and occupancies per epoch
  bool enforce_feasibility = true;
};

struct EpisodeResult {
  double total_reward = 0.0;  // per-unit-h normalization
  // worst occupancy-share distance to the reference trajectory, when one exists
  double max_deviation = std::numeric_limits<double>::quiet_NaN();
  // worst |occupancy - alpha * row census| share against the played
  // probabilities, when the policy has them
  double alpha_deviation = std::numeric_limits<double>::quiet_NaN();
  std::int64_t adapted_total = 0;     // members rerouted over the episode
  std::int64_t adapted_max_step = 0;  // largest per-epoch reroute
  std::vector<OccupancyCounts> occupancies;  // recorded when asked
  std::vector<StateCounts> censuses;         // recorded when asked
  std::vector<std::vector<double>> slack;    // normalized coupling LHS [t][ell]
};

// Plays one episode at population scale h: census in, decision out, rewards
// at every epoch including the last, then batched multinomial transitions.
EpisodeResult run_episode(const PolicyContext& ctx, const PolicySpec& policy, std::int64_t h,
                          std::uint64_t seed, const EpisodeOptions& opts = {});

// Worst occupancy-share distance between a recorded trajectory and a
// reference share trajectory.
double max_deviation(const std::vector<OccupancyCounts>& occupancies,
                     const std::vector<std::vector<double>>& reference, double scale);

struct SweepPoint {
  std::int64_t h = 0;
  std::string policy;
  int reps = 0;
  double mean_reward = 0.0;
  double ci_half = std::numeric_limits<double>::quiet_NaN();
  double subopt = std::numeric_limits<double>::quiet_NaN();
  double p_hat = std::numeric_limits<double>::quiet_NaN();
  double median_dev = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> rewards;     // per replication
  std::vector<double> deviations;  // per replication, reference distance
  std::vector<double> alpha_devs;
  std::vector<std::int64_t> adapted_totals;
};

// Replications run under child seeds split from master_seed; epsilon is the
// exceedance threshold for p_hat against the reference trajectory.
SweepPoint monte_carlo(const PolicyContext& ctx, const PolicySpec& policy, std::int64_t h,
                       int reps, std::uint64_t master_seed, double epsilon);

// Exponential decay fit of exceedance probabilities: least squares of
// ln p_hat against h, using only points with p_hat strictly inside (0, 1);
// fewer than three usable points leaves ok false.
LinearFit rate_fit(const std::vector<double>& hs, const std::vector<double>& p_hats);

}  // namespace wcg
