#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace wcg {

inline constexpr double kZ95 = 1.959963984540054;  // two-sided 95% normal quantile

inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_stddev(const std::vector<double>& v) {
  const size_t n = v.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(n - 1));
}

// Half-width of the normal-approximation 95% confidence interval; NaN with
// fewer than two replications (the insufficient-replication marker).
inline double ci_half_width(const std::vector<double>& v) {
  if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  return kZ95 * sample_stddev(v) / std::sqrt(static_cast<double>(v.size()));
}

inline double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct LinearFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double r2 = std::numeric_limits<double>::quiet_NaN();
  int points = 0;
  bool ok = false;
};

inline LinearFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
  LinearFit fit;
  const size_t n = xs.size();
  if (n != ys.size() || n < 2) return fit;
  fit.points = static_cast<int>(n);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t k = 0; k < n; ++k) {
    sx += xs[k];
    sy += ys[k];
    sxx += xs[k] * xs[k];
    sxy += xs[k] * ys[k];
  }
  const double denom = static_cast<double>(n) * sxx - sx * sx;
  if (denom == 0.0) return fit;
  fit.slope = (static_cast<double>(n) * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / static_cast<double>(n);
  double ss_res = 0, ss_tot = 0;
  const double my = sy / static_cast<double>(n);
  for (size_t k = 0; k < n; ++k) {
    const double pred = fit.intercept + fit.slope * xs[k];
    ss_res += (ys[k] - pred) * (ys[k] - pred);
    ss_tot += (ys[k] - my) * (ys[k] - my);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  fit.ok = true;
  return fit;
}

}  // namespace wcg
