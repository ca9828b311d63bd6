#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the code paths it is used to check.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "binsplit/core.hpp"

namespace oracle {

// Recomputes the fixed-grid index from raw statistics.
inline double simple_index(double loss_sum, std::int64_t n, double t) {
  if (n == 0) return -std::numeric_limits<double>::infinity();
  const double m = loss_sum / static_cast<double>(n);
  return m - std::sqrt(8.0 * std::log(t)) / std::sqrt(static_cast<double>(n));
}

inline double adaptive_index(double loss_sum, std::int64_t n, double t, double length, double mu, double alpha) {
  if (n == 0) return -std::numeric_limits<double>::infinity();
  const double m = loss_sum / static_cast<double>(n);
  return m - mu * std::exp(alpha * std::log(length)) - std::log(t) * std::pow(static_cast<double>(n), -0.5);
}

// ceil(4^(alpha k)) by repeated multiplication when alpha k is an integer.
inline std::int64_t integer_capacity(int alpha_times_k) {
  std::int64_t c = 1;
  for (int i = 0; i < alpha_times_k; ++i) c *= 4;
  return c;
}

// Number of live bins containing p, using half-open cells closed on the
// region's upper faces.
inline int containing_bins(const std::vector<binsplit::Bin>& bins, std::span<const double> p,
                           std::span<const double> region_upper) {
  int hits = 0;
  for (const auto& b : bins) {
    bool inside = true;
    for (std::size_t i = 0; i < p.size() && inside; ++i) {
      const double lo = b.corner[i];
      const double hi = b.corner[i] + b.length;
      inside = p[i] >= lo && (p[i] < hi || (p[i] == hi && hi == region_upper[i]));
    }
    hits += inside ? 1 : 0;
  }
  return hits;
}

// Least-squares slope of y on x, textbook normal equations.
inline double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
