#pragma once

// Convergence-rate predictions for the average regret R/T and empirical
// log-log rate fitting.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

namespace binsplit {

enum class RateSource { simple_upper, adaptive_upper, minimax_lower };

std::string to_string(RateSource source);

// R/T ~ T^-exponent (ln T)^log_power.
struct RatePrediction {
  double exponent = 0.0;
  double log_power = 0.0;
  RateSource source = RateSource::adaptive_upper;

  // Exponent of the cumulative regret R ~ T^(1 - exponent).
  double cumulative_exponent() const noexcept { return 1.0 - exponent; }
};

// Fixed-grid upper bound; beta enters only through min(beta, 1).
RatePrediction rate_simple(double alpha, double beta, std::size_t d);

RatePrediction rate_adaptive(double alpha, double beta, std::size_t d);

// Lower bound over functions near a reference; no log factor.
RatePrediction rate_minimax(double alpha, double beta, std::size_t d);

// side * T^(-1 / (d + 2 alpha - alpha beta)); the proportionality constant
// is fixed at one. Requires T >= 2.
double optimal_bin_length(double alpha, double beta, std::size_t d, std::int64_t T, double side = 1.0);

struct RatePoint {
  double horizon = 0.0;
  double value = 0.0;
};

struct RateFit {
  double slope = 0.0;  // empirical -exponent
  double intercept = 0.0;
  double rms_residual = 0.0;
};

// Least squares of log(value) on log(T). With log_power set, values are
// first divided by (ln T)^log_power. Throws std::invalid_argument for fewer
// than three points or nonpositive values.
RateFit fit_rate(std::span<const RatePoint> points, std::optional<double> log_power = std::nullopt);

}  // namespace binsplit
