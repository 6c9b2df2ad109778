#pragma once

#include <cstdint>
#include <vector>

namespace wcg {

// One class of statistically identical bandits. Transition kernels are
// indexed transitions[action][state][next_state]; rewards are rewards[state][action]
// and are expected per-member one-step rewards.
struct GangSpec {
  int num_states = 0;
  int num_actions = 0;
  std::vector<std::vector<std::vector<double>>> transitions;
  std::vector<std::vector<double>> rewards;
};

// Per-member resource usage of one coupling constraint: table[gang][state][action].
// A decision profile is feasible when the population-weighted sum stays at or
// below zero at every epoch.
struct ConstraintTable {
  std::vector<std::vector<std::vector<double>>> per_gang;
};

// A weakly coupled gang instance. Populations scale as h * base_pops[i];
// init_dist[i] is the within-gang initial state distribution.
struct WcgInstance {
  std::vector<GangSpec> gangs;
  std::vector<ConstraintTable> constraints;
  int horizon = 0;  // decisions happen at t = 0..horizon inclusive
  std::vector<std::int64_t> base_pops;
  std::vector<std::vector<double>> init_dist;

  int num_gangs() const { return static_cast<int>(gangs.size()); }
  int num_constraints() const { return static_cast<int>(constraints.size()); }
  std::int64_t total_base_pop() const {
    std::int64_t n = 0;
    for (auto v : base_pops) n += v;
    return n;
  }
};

struct TripleRef {
  int gang = 0;
  int state = 0;
  int action = 0;
};

struct PairRef {
  int gang = 0;
  int state = 0;
};

// Flat indexing for (gang, state, action) triples and (gang, state) pairs.
// Triples are laid out gang-major, then state, then action; pairs likewise.
class GsaIndex {
 public:
  GsaIndex() = default;
  explicit GsaIndex(const WcgInstance& inst);

  int num_gangs() const { return static_cast<int>(states_.size()); }
  int triple_count() const { return triple_total_; }
  int pair_count() const { return pair_total_; }
  int states_of(int gang) const { return states_[gang]; }
  int actions_of(int gang) const { return actions_[gang]; }

  int triple(int gang, int state, int action) const {
    return triple_base_[gang] + state * actions_[gang] + action;
  }
  int pair(int gang, int state) const { return pair_base_[gang] + state; }
  int pair_of_triple(int flat) const { return triple_pair_[flat]; }

  TripleRef triple_at(int flat) const { return triples_[flat]; }
  PairRef pair_at(int flat) const { return pairs_[flat]; }

 private:
  std::vector<int> states_;
  std::vector<int> actions_;
  std::vector<int> triple_base_;
  std::vector<int> pair_base_;
  std::vector<TripleRef> triples_;
  std::vector<PairRef> pairs_;
  std::vector<int> triple_pair_;
  int triple_total_ = 0;
  int pair_total_ = 0;
};

}  // namespace wcg
