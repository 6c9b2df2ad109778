#pragma once

#include <string>
#include <utility>
#include <vector>

#include "wcg/instance.hpp"
#include "wcg/lp.hpp"
#include "wcg/simulator.hpp"

namespace wcg {

// Shortest-width exact decimal rendering (%.17g) shared by every text
// exporter, so equal values always serialize to identical bytes.
std::string format_double(double v);

// Instance files use the wcg-v1 schema: {"format": "wcg-v1", "gangs":
// [{"states", "actions", "transitions"[a][s][s'], "rewards"[s][a]}],
// "constraints"[l][i][s][a], "horizon", "base_pops"[i], "init_dist"[i][s]}.
// A "builtin" field names a bundled generator instead of spelling out the
// model; explicit horizon/base_pops/init_dist fields then override the
// generated ones. Malformed input raises std::runtime_error naming the
// offending field.
WcgInstance instance_from_json(const std::string& text);
WcgInstance load_instance(const std::string& path);
std::string instance_to_json(const WcgInstance& inst);

// {"status", "objective", "iterations", "x"[t][gsa], "residuals", ...}
std::string solution_to_json(const LpProblem& lp, const LpSolution& sol);

// Conditional action probabilities, one row per (t, gang, state, action).
std::string alpha_to_csv(const GsaIndex& idx, const std::vector<std::vector<double>>& alpha);

// Recorded occupancy trajectories, columns rep,t,gsa_flat,count. Episodes
// must have been run with record_trajectory set.
std::string trajectory_to_csv(const std::vector<EpisodeResult>& episodes);

// Sweep table, columns h,policy,mean_reward,ci,subopt,p_hat,median_dev.
std::string sweep_to_csv(const std::vector<SweepPoint>& points);

// Inverse of sweep_to_csv for the summary columns (raw per-replication
// vectors and rep counts are not part of the CSV).
std::vector<SweepPoint> sweep_from_csv(const std::string& text);

std::string sweep_to_json(const std::vector<SweepPoint>& points,
                          const std::vector<std::pair<std::string, LinearFit>>& fits);

}  // namespace wcg
