#include "wcg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "wcg/counts.hpp"

namespace wcg {
namespace {

std::int64_t compositions_count(std::int64_t n, int parts) {
  // C(n + parts - 1, parts - 1); clamped well above any usable cap on overflow
  constexpr std::int64_t kClamp = std::numeric_limits<std::int64_t>::max() / 4;
  __int128 result = 1;
  for (int k = 1; k < parts; ++k) {
    result = result * (n + k) / k;  // exact: product of k consecutive ints / k!
    if (result > kClamp) return kClamp;
  }
  return static_cast<std::int64_t>(result);
}

// Lexicographic rank of a fixed-sum composition, first part most significant.
struct CompositionIndexer {
  std::int64_t total = 0;
  int parts = 1;

  std::int64_t count() const { return compositions_count(total, parts); }

  std::int64_t rank(const std::int64_t* c) const {
    std::int64_t idx = 0;
    std::int64_t remaining = total;
    for (int p = 0; p + 1 < parts; ++p) {
      for (std::int64_t v = 0; v < c[p]; ++v)
        idx += compositions_count(remaining - v, parts - p - 1);
      remaining -= c[p];
    }
    return idx;
  }
};

struct Cell {
  int gang = 0;
  int state = 0;
  std::int64_t count = 0;
};

struct Unit {
  int gang = 0;
  int state = 0;
  int action = 0;
  std::int64_t count = 0;
};

class OracleSolver {
 public:
  OracleSolver(const WcgInstance& inst, std::int64_t h, std::int64_t cap)
      : inst_(inst), idx_(inst), h_(h) {
    const int I = inst.num_gangs();
    indexers_.resize(I);
    strides_.resize(I);
    joint_count_ = 1;
    for (int i = 0; i < I; ++i) {
      indexers_[i] = {h * inst.base_pops[i], inst.gangs[i].num_states};
      strides_[i] = joint_count_;
      const std::int64_t gc = indexers_[i].count();
      if (gc > cap / std::max<std::int64_t>(joint_count_, 1) + 1) {
        joint_count_ = cap + 1;
        break;
      }
      joint_count_ *= gc;
    }
    const std::int64_t slices = inst.horizon + 1;
    if (joint_count_ > cap || joint_count_ > cap / slices)
      throw OracleCapExceeded("joint census space needs over " + std::to_string(joint_count_) +
                              " states per epoch, cap is " + std::to_string(cap) +
                              " state-time pairs");
    fact_.resize(1, 1.0);
  }

  double solve() {
    const int T = inst_.horizon;
    std::vector<double> next;  // V_{t+1}
    std::vector<double> cur;
    std::vector<std::int64_t> census(idx_.pair_count());
    for (int t = T; t >= 0; --t) {
      cur.resize(joint_count_);
      for (std::int64_t js = 0; js < joint_count_; ++js) {
        unrank_joint(js, census.data());
        cur[js] = best_value(census.data(), t < T ? &next : nullptr);
      }
      std::swap(cur, next);
    }
    const StateCounts init = scale_initial_counts(inst_, idx_, h_);
    const double v = next[rank_joint(init.counts.data())];
    if (v == -std::numeric_limits<double>::infinity())
      throw std::runtime_error("no feasible decision sequence from the initial census");
    return v;
  }

 private:
  std::int64_t rank_joint(const std::int64_t* census) const {
    std::int64_t idx = 0;
    int offset = 0;
    for (int i = 0; i < inst_.num_gangs(); ++i) {
      idx += strides_[i] * indexers_[i].rank(census + offset);
      offset += inst_.gangs[i].num_states;
    }
    return idx;
  }

  void unrank_joint(std::int64_t idx, std::int64_t* census) const {
    int offset = 0;
    for (int i = 0; i < inst_.num_gangs(); ++i) {
      const CompositionIndexer& ix = indexers_[i];
      std::int64_t gi = (idx / strides_[i]) % ix.count();
      std::int64_t remaining = ix.total;
      for (int p = 0; p + 1 < ix.parts; ++p) {
        std::int64_t v = 0;
        while (true) {
          const std::int64_t block = compositions_count(remaining - v, ix.parts - p - 1);
          if (gi < block) break;
          gi -= block;
          ++v;
        }
        census[offset + p] = v;
        remaining -= v;
      }
      census[offset + ix.parts - 1] = remaining;
      offset += ix.parts;
    }
  }

  double factorial(std::int64_t n) {
    while (static_cast<std::int64_t>(fact_.size()) <= n)
      fact_.push_back(fact_.back() * static_cast<double>(fact_.size()));
    return fact_[n];
  }

  // maximize immediate plus expected future reward over feasible action splits
  double best_value(const std::int64_t* census, const std::vector<double>* next) {
    cells_.clear();
    for (int p = 0; p < idx_.pair_count(); ++p)
      if (census[p] > 0) {
        const PairRef pr = idx_.pair_at(p);
        cells_.push_back({pr.gang, pr.state, census[p]});
      }
    best_ = -std::numeric_limits<double>::infinity();
    units_.clear();
    lhs_.assign(inst_.num_constraints(), 0.0);
    descend_cells(0, 0.0, next);
    return best_;
  }

  void descend_cells(size_t cell, double reward, const std::vector<double>* next) {
    if (cell == cells_.size()) {
      for (double v : lhs_)
        if (v > 1e-9) return;
      double value = reward / static_cast<double>(h_);
      if (next != nullptr) value += expected_future(*next);
      best_ = std::max(best_, value);
      return;
    }
    const Cell& c = cells_[cell];
    const int na = inst_.gangs[c.gang].num_actions;
    split_.assign(na, 0);
    descend_actions(cell, 0, c.count, reward, next);
  }

  void descend_actions(size_t cell, int action, std::int64_t remaining, double reward,
                       const std::vector<double>* next) {
    const Cell& c = cells_[cell];
    const int na = inst_.gangs[c.gang].num_actions;
    if (action == na - 1) {
      split_[action] = remaining;
      apply_split(cell, reward, next);
      return;
    }
    for (std::int64_t take = 0; take <= remaining; ++take) {
      split_[action] = take;
      descend_actions(cell, action + 1, remaining - take, reward, next);
    }
    split_[action] = 0;
  }

  void apply_split(size_t cell, double reward, const std::vector<double>* next) {
    const Cell& c = cells_[cell];
    const int na = inst_.gangs[c.gang].num_actions;
    const size_t unit_mark = units_.size();
    double extra = 0.0;
    for (int a = 0; a < na; ++a) {
      const std::int64_t k = split_[a];
      if (k == 0) continue;
      units_.push_back({c.gang, c.state, a, k});
      extra += static_cast<double>(k) * inst_.gangs[c.gang].rewards[c.state][a];
      for (int ell = 0; ell < inst_.num_constraints(); ++ell)
        lhs_[ell] += static_cast<double>(k) *
                     inst_.constraints[ell].per_gang[c.gang][c.state][a];
    }
    const std::vector<std::int64_t> saved(split_);
    descend_cells(cell + 1, reward + extra, next);
    split_ = saved;
    for (size_t u = unit_mark; u < units_.size(); ++u) {
      const Unit& unit = units_[u];
      for (int ell = 0; ell < inst_.num_constraints(); ++ell)
        lhs_[ell] -= static_cast<double>(unit.count) *
                     inst_.constraints[ell].per_gang[unit.gang][unit.state][unit.action];
    }
    units_.resize(unit_mark);
  }

  double expected_future(const std::vector<double>& next) {
    next_census_.assign(idx_.pair_count(), 0);
    return convolve_unit(0, 1.0, next);
  }

  // walks the product of per-unit multinomial splits over next states
  double convolve_unit(size_t u, double prob, const std::vector<double>& next) {
    if (u == units_.size()) return prob * next[rank_joint(next_census_.data())];
    const Unit& unit = units_[u];
    const auto& row = inst_.gangs[unit.gang].transitions[unit.action][unit.state];
    const int ns = inst_.gangs[unit.gang].num_states;
    return convolve_states(u, 0, unit.count, prob * factorial(unit.count), 1.0, ns, row, next);
  }

  double convolve_states(size_t u, int s2, std::int64_t remaining, double base, double acc_p,
                         int ns, const std::vector<double>& row,
                         const std::vector<double>& next) {
    const Unit& unit = units_[u];
    if (s2 == ns - 1) {
      if (remaining > 0 && row[s2] <= 0.0) return 0.0;
      double prob = base * acc_p / factorial(remaining);
      for (std::int64_t k = 0; k < remaining; ++k) prob *= row[s2];
      next_census_[idx_.pair(unit.gang, s2)] += remaining;
      const double v = convolve_unit(u + 1, prob, next);
      next_census_[idx_.pair(unit.gang, s2)] -= remaining;
      return v;
    }
    double total = 0.0;
    const std::int64_t top = row[s2] > 0.0 ? remaining : 0;
    double powp = 1.0;
    for (std::int64_t take = 0; take <= top; ++take) {
      if (take > 0) powp *= row[s2];
      next_census_[idx_.pair(unit.gang, s2)] += take;
      total += convolve_states(u, s2 + 1, remaining - take, base, acc_p * powp / factorial(take),
                               ns, row, next);
      next_census_[idx_.pair(unit.gang, s2)] -= take;
    }
    return total;
  }

  const WcgInstance& inst_;
  GsaIndex idx_;
  std::int64_t h_;
  std::vector<CompositionIndexer> indexers_;
  std::vector<std::int64_t> strides_;
  std::int64_t joint_count_ = 1;
  std::vector<double> fact_;

  std::vector<Cell> cells_;
  std::vector<Unit> units_;
  std::vector<std::int64_t> split_;
  std::vector<double> lhs_;
  std::vector<std::int64_t> next_census_;
  double best_ = 0.0;
};

}  // namespace

double exact_oracle(const WcgInstance& inst, std::int64_t h, std::int64_t cap) {
  OracleSolver solver(inst, h, cap);
  return solver.solve();
}

}  // namespace wcg
