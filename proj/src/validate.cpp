#include "wcg/validate.hpp"

#include <cmath>
#include <sstream>

namespace wcg {
namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kDistSumTol = 1e-12;
constexpr double kTieTol = 1e-12;

std::string row_label(int gang, int state, int action) {
  std::ostringstream os;
  os << "gang " << gang << ", state " << state << ", action " << action;
  return os.str();
}

}  // namespace

std::vector<std::vector<int>> common_min_actions(const WcgInstance& inst) {
  const int L = inst.num_constraints();
  std::vector<std::vector<int>> table(inst.num_gangs());
  for (int i = 0; i < inst.num_gangs(); ++i) {
    const int ns = inst.gangs[i].num_states;
    const int na = inst.gangs[i].num_actions;
    table[i].assign(ns, -1);
    for (int s = 0; s < ns; ++s) {
      for (int a = 0; a < na; ++a) {
        bool min_everywhere = true;
        for (int ell = 0; ell < L && min_everywhere; ++ell) {
          const auto& row = inst.constraints[ell].per_gang[i][s];
          double lo = row[0];
          for (int b = 1; b < na; ++b) lo = std::min(lo, row[b]);
          if (row[a] > lo + kTieTol) min_everywhere = false;
        }
        if (min_everywhere) {
          table[i][s] = a;
          break;
        }
      }
      if (table[i][s] == -1 && L == 0) table[i][s] = 0;
    }
  }
  return table;
}

ValidationReport validate_instance(const WcgInstance& inst) {
  ValidationReport rep;
  auto err = [&rep](const char* code, const std::string& msg) {
    rep.errors.push_back({code, msg});
  };
  auto warn = [&rep](const char* code, const std::string& msg) {
    rep.warnings.push_back({code, msg});
  };

  const int num_gangs = inst.num_gangs();
  const int L = inst.num_constraints();
  if (num_gangs == 0) err("empty", "instance has no gangs");
  if (inst.horizon < 0) err("horizon", "horizon must be non-negative");
  if (static_cast<int>(inst.base_pops.size()) != num_gangs)
    err("shape", "base_pops length does not match gang count");
  if (static_cast<int>(inst.init_dist.size()) != num_gangs)
    err("shape", "init_dist length does not match gang count");

  for (int i = 0; i < num_gangs; ++i) {
    const auto& g = inst.gangs[i];
    if (g.num_states <= 0 || g.num_actions <= 0) {
      err("shape", "gang " + std::to_string(i) + " needs at least one state and action");
      continue;
    }
    if (g.num_actions == 1) rep.degenerate_gangs.push_back(i);
    if (i < static_cast<int>(inst.base_pops.size()) && inst.base_pops[i] < 1)
      err("population", "gang " + std::to_string(i) + " base population must be >= 1");

    if (static_cast<int>(g.transitions.size()) != g.num_actions) {
      err("shape", "gang " + std::to_string(i) + " kernel count != action count");
      continue;
    }
    bool shape_ok = true;
    for (int a = 0; a < g.num_actions && shape_ok; ++a) {
      if (static_cast<int>(g.transitions[a].size()) != g.num_states) {
        err("shape", "gang " + std::to_string(i) + " kernel " + std::to_string(a) +
                         " row count != state count");
        shape_ok = false;
        break;
      }
      for (int s = 0; s < g.num_states; ++s) {
        const auto& row = g.transitions[a][s];
        if (static_cast<int>(row.size()) != g.num_states) {
          err("shape", "transition row too short at " + row_label(i, s, a));
          shape_ok = false;
          break;
        }
        double sum = 0.0;
        for (double p : row) {
          if (!std::isfinite(p) || p < -kRowSumTol) {
            err("probability", "negative or non-finite probability at " + row_label(i, s, a));
            shape_ok = false;
            break;
          }
          sum += p;
        }
        if (!shape_ok) break;
        const double resid = std::abs(sum - 1.0);
        rep.max_row_residual = std::max(rep.max_row_residual, resid);
        if (resid > kRowSumTol)
          err("stochastic", "transition row does not sum to one at " + row_label(i, s, a));
      }
    }

    if (static_cast<int>(g.rewards.size()) != g.num_states) {
      err("shape", "gang " + std::to_string(i) + " reward rows != state count");
    } else {
      for (int s = 0; s < g.num_states; ++s) {
        if (static_cast<int>(g.rewards[s].size()) != g.num_actions) {
          err("shape", "gang " + std::to_string(i) + " reward row " + std::to_string(s) +
                           " length != action count");
          break;
        }
        for (double r : g.rewards[s])
          if (!std::isfinite(r)) {
            err("reward", "non-finite reward in gang " + std::to_string(i));
            break;
          }
      }
    }

    if (i < static_cast<int>(inst.init_dist.size())) {
      const auto& d = inst.init_dist[i];
      if (static_cast<int>(d.size()) != g.num_states) {
        err("shape", "init_dist for gang " + std::to_string(i) + " length != state count");
      } else {
        double sum = 0.0;
        for (double p : d) {
          if (!std::isfinite(p) || p < -kDistSumTol) {
            err("init", "negative initial probability in gang " + std::to_string(i));
            break;
          }
          sum += p;
        }
        if (std::abs(sum - 1.0) > kDistSumTol)
          err("init", "init_dist for gang " + std::to_string(i) + " does not sum to one");
      }
    }
  }

  for (int ell = 0; ell < L; ++ell) {
    const auto& tab = inst.constraints[ell].per_gang;
    if (static_cast<int>(tab.size()) != num_gangs) {
      err("shape", "constraint " + std::to_string(ell) + " gang count mismatch");
      continue;
    }
    for (int i = 0; i < num_gangs; ++i) {
      const auto& g = inst.gangs[i];
      if (static_cast<int>(tab[i].size()) != g.num_states) {
        err("shape", "constraint " + std::to_string(ell) + " state rows mismatch in gang " +
                         std::to_string(i));
        continue;
      }
      for (int s = 0; s < g.num_states; ++s) {
        if (static_cast<int>(tab[i][s].size()) != g.num_actions) {
          err("shape", "constraint " + std::to_string(ell) + " action row mismatch at gang " +
                           std::to_string(i) + " state " + std::to_string(s));
          break;
        }
        for (double v : tab[i][s])
          if (!std::isfinite(v)) {
            err("constraint", "non-finite coupling cost in constraint " + std::to_string(ell));
            break;
          }
      }
    }
  }

  if (!rep.errors.empty()) {
    rep.assumption_holds = false;
    return rep;
  }

  // Feasibility assumption, part one: every (gang, state) row needs an action
  // that minimizes all coupling costs at once.
  rep.min_actions = common_min_actions(inst);
  bool part_one = true;
  for (int i = 0; i < num_gangs; ++i)
    for (int s = 0; s < inst.gangs[i].num_states; ++s)
      if (rep.min_actions[i][s] < 0) {
        part_one = false;
        warn("assumption", "no common cost-minimizing action at gang " + std::to_string(i) +
                               " state " + std::to_string(s));
      }

  // Part two, checked at the initial distribution: the all-minimizer profile
  // must itself be feasible.
  bool part_two = part_one;
  if (part_one) {
    for (int ell = 0; ell < L; ++ell) {
      double lhs = 0.0;
      for (int i = 0; i < num_gangs; ++i) {
        double gang_term = 0.0;
        for (int s = 0; s < inst.gangs[i].num_states; ++s)
          gang_term += inst.init_dist[i][s] *
                       inst.constraints[ell].per_gang[i][s][rep.min_actions[i][s]];
        lhs += static_cast<double>(inst.base_pops[i]) * gang_term;
      }
      if (lhs > 1e-9) {
        part_two = false;
        warn("assumption", "all-minimizer profile violates constraint " + std::to_string(ell) +
                               " at the initial distribution");
      }
    }
  }
  rep.assumption_holds = part_one && part_two;

  for (int i : rep.degenerate_gangs)
    warn("degenerate", "gang " + std::to_string(i) + " offers a single action");

  return rep;
}

}  // namespace wcg
