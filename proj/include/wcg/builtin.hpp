#pragma once

#include <cstdint>
#include <string>

#include "wcg/instance.hpp"

namespace wcg {

// The bundled five-gang service benchmark: four service gangs with admission
// control plus one uncontrolled arrival gang, six coupling rows (one
// admission budget, five shared capacities), horizon 30. By default the cost
// term of the reward is the flat per-gang figure; usage_scaled_costs charges
// it per occupied service slot instead.
WcgInstance generate_appendix_g(bool usage_scaled_costs = false);

// Maps a builtin name ("appendix-g", "appendix-g-usage") to its generator.
WcgInstance make_builtin(const std::string& name);

struct RandomSpec {
  int num_gangs = 2;
  int min_states = 2;
  int max_states = 3;
  int min_actions = 2;
  int max_actions = 3;
  int num_constraints = 1;
  int horizon = 3;
  // keep a per-row common minimizer with strictly negative cost, so adaption
  // can always succeed and the all-minimizer profile is feasible
  bool ensure_assumption = true;
  bool point_mass_init = true;
};

// Deterministic randomized instance for tests and studies; base populations
// are all one.
WcgInstance make_random_instance(const RandomSpec& spec, std::uint64_t seed);

}  // namespace wcg
