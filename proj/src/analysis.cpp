#include "binsplit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "binsplit/errors.hpp"
#include "binsplit/objectives.hpp"
#include "binsplit/stats.hpp"

namespace binsplit {

std::string to_string(RateSource source) {
  switch (source) {
    case RateSource::simple_upper: return "simple_upper";
    case RateSource::adaptive_upper: return "adaptive_upper";
    case RateSource::minimax_lower: return "minimax_lower";
  }
  return "unknown";
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ConfigError("alpha", "must lie in (0, 2]");
}

double adaptive_denominator(double alpha, double beta, std::size_t d) {
  return static_cast<double>(d) + 2.0 * alpha - alpha * beta;
}

}  // namespace

RatePrediction rate_simple(double alpha, double beta, std::size_t d) {
  check_alpha(alpha);
  require_beta_bound(alpha, beta, d);
  const double b = std::min(beta, 1.0);
  return {alpha / adaptive_denominator(alpha, b, d), 1.0 / (2.0 - b), RateSource::simple_upper};
}

RatePrediction rate_adaptive(double alpha, double beta, std::size_t d) {
  check_alpha(alpha);
  require_beta_bound(alpha, beta, d);
  return {alpha / adaptive_denominator(alpha, beta, d), beta + 1.0, RateSource::adaptive_upper};
}

RatePrediction rate_minimax(double alpha, double beta, std::size_t d) {
  RatePrediction p = rate_adaptive(alpha, beta, d);
  p.log_power = 0.0;
  p.source = RateSource::minimax_lower;
  return p;
}

double optimal_bin_length(double alpha, double beta, std::size_t d, std::int64_t T, double side) {
  check_alpha(alpha);
  require_beta_bound(alpha, beta, d);
  if (T < 2) throw ConfigError("horizon", "bin-length prescription needs T >= 2");
  return side * std::pow(static_cast<double>(T), -1.0 / adaptive_denominator(alpha, beta, d));
}

RateFit fit_rate(std::span<const RatePoint> points, std::optional<double> log_power) {
  if (points.size() < 3) throw std::invalid_argument("fit_rate: need at least three points");
  std::vector<double> x;
  std::vector<double> y;
  for (const RatePoint& p : points) {
    if (!(p.horizon > 0.0) || !(p.value > 0.0))
      throw std::invalid_argument("fit_rate: horizons and values must be positive");
    double v = p.value;
    if (log_power) {
      if (!(p.horizon > 1.0)) throw std::invalid_argument("fit_rate: log deflation needs T > 1");
      v /= std::pow(std::log(p.horizon), *log_power);
    }
    x.push_back(std::log(p.horizon));
    y.push_back(std::log(v));
  }
  const LineFit line = fit_line(x, y);
  return {line.slope, line.intercept, line.rms_residual};
}

}  // namespace binsplit
