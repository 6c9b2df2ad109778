#include "wcg/builtin.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "wcg/rng.hpp"

namespace wcg {
namespace {

constexpr int kServiceGangs = 4;
constexpr int kArrivalStatesPerAxis = 31;  // backlog levels and phases, 0..30
constexpr int kBenchmarkHorizon = 30;

const int kServiceStates[kServiceGangs] = {2, 3, 3, 4};
const double kRevenue[kServiceGangs] = {110.3085, 122.0775, 120.3569, 100.182};
const double kUnitCost[5] = {1.3687, 1.0789, 0.6667, 0.1523, 1.9761};
const double kCapacity[5] = {8, 5, 9, 7, 8};
const double kUsage[kServiceGangs][5] = {
    {0, 3, 0, 1, 0},
    {1, 0, 0, 0, 3},
    {3, 0, 1, 0, 0},
    {0, 0, 3, 1, 0},
};
const double kCompletion[kServiceGangs] = {0.3, 0.3, 0.3, 0.2};
const double kArrivalRate[kArrivalStatesPerAxis] = {
    10, 9.6, 9,   5.8, 6.8, 3.2, 6.2, 5.2, 5.5, 8.8, 5,   4.6, 4,   2.8, 1.8, 3.2,
    3.2, 2.2, 2.5, 0,   6,   3.6, 3,   2.8, 3.8, 3.2, 5.2, 5.2, 2.5, 4.4, 0};

// Service kernel: an action admits up to the free capacity, then each member
// previously in service completes independently.
GangSpec make_service_gang(int num_states, double completion, double revenue,
                           const double* usage, bool usage_scaled_costs) {
  GangSpec g;
  g.num_states = num_states;
  g.num_actions = num_states;
  const int full = num_states - 1;
  g.transitions.assign(g.num_actions, std::vector<std::vector<double>>(
                                          num_states, std::vector<double>(num_states, 0.0)));
  for (int a = 0; a < g.num_actions; ++a)
    for (int s = 0; s < num_states; ++s) {
      const int admitted = std::min(full - s, a);
      const int occupied = s + admitted;
      // the s old members complete independently, fresh admissions stay
      for (int done = 0; done <= s; ++done) {
        double prob = 1.0;
        for (int k = 0; k < done; ++k) prob *= completion;
        for (int k = 0; k < s - done; ++k) prob *= 1.0 - completion;
        double binom = 1.0;
        for (int k = 0; k < done; ++k)
          binom = binom * static_cast<double>(s - k) / static_cast<double>(k + 1);
        g.transitions[a][s][occupied - done] += binom * prob;
      }
    }
  g.rewards.assign(num_states, std::vector<double>(g.num_actions, 0.0));
  double cost = 0.0;
  for (int k = 0; k < 5; ++k) cost += kUnitCost[k] * usage[k];
  for (int s = 0; s < num_states; ++s)
    for (int a = 0; a < g.num_actions; ++a)
      g.rewards[s][a] = revenue * static_cast<double>(s) * completion -
                        (usage_scaled_costs
                             ? cost * static_cast<double>(std::min(full, s + a))
                             : cost);
  return g;
}

int arrival_state(int backlog, int phase) { return backlog * kArrivalStatesPerAxis + phase; }

GangSpec make_arrival_gang() {
  GangSpec g;
  g.num_states = kArrivalStatesPerAxis * kArrivalStatesPerAxis;
  g.num_actions = 1;
  g.transitions.assign(1, std::vector<std::vector<double>>(g.num_states,
                                                           std::vector<double>(g.num_states, 0.0)));
  g.rewards.assign(g.num_states, std::vector<double>(1, 0.0));
  for (int phase = 0; phase < kArrivalStatesPerAxis; ++phase) {
    const double lambda = kArrivalRate[phase];
    const int next_phase = std::min(phase + 1, kArrivalStatesPerAxis - 1);
    std::vector<double> pmf(kArrivalStatesPerAxis, 0.0);
    double cum = 0.0;
    double p = std::exp(-lambda);
    for (int k = 0; k + 1 < kArrivalStatesPerAxis; ++k) {
      pmf[k] = p;
      cum += p;
      p *= lambda / static_cast<double>(k + 1);
    }
    pmf[kArrivalStatesPerAxis - 1] = std::max(0.0, 1.0 - cum);  // folded tail
    for (int backlog = 0; backlog < kArrivalStatesPerAxis; ++backlog) {
      auto& row = g.transitions[0][arrival_state(backlog, phase)];
      for (int k = 0; k < kArrivalStatesPerAxis; ++k)
        row[arrival_state(k, next_phase)] = pmf[k];
    }
  }
  return g;
}

}  // namespace

WcgInstance generate_appendix_g(bool usage_scaled_costs) {
  WcgInstance inst;
  inst.horizon = kBenchmarkHorizon;
  for (int i = 0; i < kServiceGangs; ++i)
    inst.gangs.push_back(make_service_gang(kServiceStates[i], kCompletion[i], kRevenue[i],
                                           kUsage[i], usage_scaled_costs));
  inst.gangs.push_back(make_arrival_gang());
  const int I = inst.num_gangs();
  inst.base_pops.assign(I, 1);
  inst.init_dist.resize(I);
  for (int i = 0; i < I; ++i) {
    inst.init_dist[i].assign(inst.gangs[i].num_states, 0.0);
    inst.init_dist[i][0] = 1.0;
  }

  // admission budget: service starts across gangs cannot exceed fresh arrivals
  ConstraintTable admission;
  admission.per_gang.resize(I);
  for (int i = 0; i < kServiceGangs; ++i) {
    const int full = inst.gangs[i].num_states - 1;
    admission.per_gang[i].assign(inst.gangs[i].num_states,
                                 std::vector<double>(inst.gangs[i].num_actions, 0.0));
    for (int s = 0; s <= full; ++s)
      for (int a = 0; a <= full; ++a)
        admission.per_gang[i][s][a] = static_cast<double>(std::min(full - s, a));
  }
  admission.per_gang[kServiceGangs].assign(inst.gangs[kServiceGangs].num_states,
                                           std::vector<double>(1, 0.0));
  for (int backlog = 0; backlog < kArrivalStatesPerAxis; ++backlog)
    for (int phase = 0; phase < kArrivalStatesPerAxis; ++phase)
      admission.per_gang[kServiceGangs][arrival_state(backlog, phase)][0] =
          -static_cast<double>(backlog);
  inst.constraints.push_back(std::move(admission));

  // shared capacities: usage of occupied service slots against a budget
  // spread over the service gangs
  for (int k = 0; k < 5; ++k) {
    ConstraintTable cap;
    cap.per_gang.resize(I);
    for (int i = 0; i < kServiceGangs; ++i) {
      const int full = inst.gangs[i].num_states - 1;
      const double share = kCapacity[k] / (static_cast<double>(I - 1) *
                                           static_cast<double>(inst.base_pops[i]));
      cap.per_gang[i].assign(inst.gangs[i].num_states,
                             std::vector<double>(inst.gangs[i].num_actions, 0.0));
      for (int s = 0; s <= full; ++s)
        for (int a = 0; a <= full; ++a)
          cap.per_gang[i][s][a] =
              kUsage[i][k] * static_cast<double>(std::min(full, s + a)) - share;
    }
    cap.per_gang[kServiceGangs].assign(inst.gangs[kServiceGangs].num_states,
                                       std::vector<double>(1, 0.0));
    inst.constraints.push_back(std::move(cap));
  }
  return inst;
}

WcgInstance make_builtin(const std::string& name) {
  if (name == "appendix-g") return generate_appendix_g();
  if (name == "appendix-g-usage") return generate_appendix_g(true);
  throw std::invalid_argument("unknown builtin instance: " + name);
}

WcgInstance make_random_instance(const RandomSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(splitmix64(seed));
  auto pick = [&rng](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  auto unit = [&rng] { return uniform01(rng); };

  WcgInstance inst;
  inst.horizon = spec.horizon;
  inst.gangs.resize(spec.num_gangs);
  inst.base_pops.assign(spec.num_gangs, 1);
  inst.init_dist.resize(spec.num_gangs);
  for (int i = 0; i < spec.num_gangs; ++i) {
    GangSpec& g = inst.gangs[i];
    g.num_states = pick(spec.min_states, spec.max_states);
    g.num_actions = pick(spec.min_actions, spec.max_actions);
    g.transitions.assign(g.num_actions, std::vector<std::vector<double>>(
                                            g.num_states, std::vector<double>(g.num_states)));
    for (int a = 0; a < g.num_actions; ++a)
      for (int s = 0; s < g.num_states; ++s) {
        double sum = 0.0;
        for (int s2 = 0; s2 < g.num_states; ++s2) {
          const double v = -std::log(1.0 - unit());
          g.transitions[a][s][s2] = v;
          sum += v;
        }
        for (int s2 = 0; s2 < g.num_states; ++s2) g.transitions[a][s][s2] /= sum;
      }
    g.rewards.assign(g.num_states, std::vector<double>(g.num_actions));
    for (auto& row : g.rewards)
      for (double& r : row) r = 2.0 * unit();

    inst.init_dist[i].assign(g.num_states, 0.0);
    if (spec.point_mass_init) {
      inst.init_dist[i][pick(0, g.num_states - 1)] = 1.0;
    } else {
      double sum = 0.0;
      for (double& p : inst.init_dist[i]) {
        p = -std::log(1.0 - unit());
        sum += p;
      }
      for (double& p : inst.init_dist[i]) p /= sum;
    }
  }

  // anchor action per (gang, state), shared by all constraints
  std::vector<std::vector<int>> anchor(spec.num_gangs);
  for (int i = 0; i < spec.num_gangs; ++i) {
    anchor[i].resize(inst.gangs[i].num_states);
    for (int& a : anchor[i]) a = pick(0, inst.gangs[i].num_actions - 1);
  }

  inst.constraints.resize(spec.num_constraints);
  for (int ell = 0; ell < spec.num_constraints; ++ell) {
    auto& per_gang = inst.constraints[ell].per_gang;
    per_gang.resize(spec.num_gangs);
    for (int i = 0; i < spec.num_gangs; ++i) {
      const GangSpec& g = inst.gangs[i];
      per_gang[i].assign(g.num_states, std::vector<double>(g.num_actions));
      for (int s = 0; s < g.num_states; ++s) {
        if (spec.ensure_assumption) {
          const double floor_cost = -(0.2 + 0.8 * unit());
          for (int a = 0; a < g.num_actions; ++a) {
            if (a == anchor[i][s])
              per_gang[i][s][a] = floor_cost;
            else
              per_gang[i][s][a] = floor_cost + (unit() < 0.1 ? 0.0 : 2.0 * unit());
          }
        } else {
          for (int a = 0; a < g.num_actions; ++a) per_gang[i][s][a] = 2.0 * unit() - 1.0;
        }
      }
    }
  }
  return inst;
}

}  // namespace wcg
