#pragma once

#include <span>

namespace binsplit {

double mean(std::span<const double> xs);

// Sample standard deviation divided by sqrt(n); 0 for n < 2.
double standard_error(std::span<const double> xs);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};

// Ordinary least squares y = slope * x + intercept. Requires at least two
// distinct x values.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace binsplit
