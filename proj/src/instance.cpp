#include "wcg/instance.hpp"

namespace wcg {

GsaIndex::GsaIndex(const WcgInstance& inst) {
  const int num_gangs = inst.num_gangs();
  states_.resize(num_gangs);
  actions_.resize(num_gangs);
  triple_base_.resize(num_gangs);
  pair_base_.resize(num_gangs);
  for (int i = 0; i < num_gangs; ++i) {
    states_[i] = inst.gangs[i].num_states;
    actions_[i] = inst.gangs[i].num_actions;
    triple_base_[i] = triple_total_;
    pair_base_[i] = pair_total_;
    triple_total_ += states_[i] * actions_[i];
    pair_total_ += states_[i];
  }
  triples_.reserve(triple_total_);
  triple_pair_.reserve(triple_total_);
  pairs_.reserve(pair_total_);
  for (int i = 0; i < num_gangs; ++i) {
    for (int s = 0; s < states_[i]; ++s) {
      pairs_.push_back({i, s});
      for (int a = 0; a < actions_[i]; ++a) {
        triples_.push_back({i, s, a});
        triple_pair_.push_back(pair_base_[i] + s);
      }
    }
  }
}

}  // namespace wcg
