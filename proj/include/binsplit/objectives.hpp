#pragma once

// Benchmark cost functions, the noisy observation channel and numerical
// diagnostics for the smoothness (alpha, M) and sublevel-set (beta)
// parameters.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "binsplit/core.hpp"
#include "binsplit/random.hpp"

namespace binsplit {

struct AssumptionParams {
  double alpha = 1.0;  // smoothness exponent, (0, 2]
  double beta = 0.0;   // sublevel-set exponent, <= d / alpha
  double M = 1.0;      // bounds both f - f* on S and the cube-average deviation
  double C0 = 1.0;     // packing constant (informational)
  double A = 0.0;      // query margin
};

enum class Norm { l2, sup };

std::string to_string(Norm norm);
Norm norm_from_string(const std::string& name);

class Objective {
 public:
  using Function = std::function<double(std::span<const double>)>;

  Objective(std::string name, std::size_t dim, Function f, double optimum_value,
            std::optional<AssumptionParams> assumption = std::nullopt);

  const std::string& name() const noexcept { return name_; }
  std::size_t dim() const noexcept { return dim_; }
  double optimum_value() const noexcept { return optimum_; }
  const std::optional<AssumptionParams>& assumption() const noexcept { return assumption_; }

  // Throws ConfigError on dimension mismatch.
  double operator()(std::span<const double> x) const;

  // f(x) - f(x*), clamped at zero against round-off.
  double gap(std::span<const double> x) const;

 private:
  std::string name_;
  std::size_t dim_;
  Function f_;
  double optimum_;
  std::optional<AssumptionParams> assumption_;
};

// 10 * ||x + c||_2^2
double eval_f1(std::span<const double> x, std::span<const double> c);

// 10 * min(||x - c||, ||x + c||)
double eval_f2(std::span<const double> x, std::span<const double> c, Norm norm = Norm::l2);

// Benchmark registry entry as read from configuration.
struct ObjectiveSpec {
  std::string name = "f1";  // f1 | f2 | constant | step
  std::size_t dim = 1;
  std::vector<double> offset;  // c; empty means 0.5 in every coordinate
  Norm norm = Norm::l2;        // f2 only
  double value = 0.0;          // constant: the constant value
  double threshold = 0.0;      // step: f = 0 for x_0 < threshold, else gap
  double gap = 1.0;            // step
  std::optional<AssumptionParams> assumption;  // overrides the built-in parameters
};

// Builds a registry objective. Built-in assumption parameters (alpha, beta
// and M measured over `space`) are attached for f1 and f2.
Objective make_objective(const ObjectiveSpec& spec, const DecisionSpace& space);

// max over a grid of S of f - f*; used for the M in assumption params.
double max_gap_on_box(const Objective& obj, const DecisionSpace& space);

struct NoiseModel {
  double scale = 1.0;  // standard deviation of the Gaussian noise
};

// f(x) + scale * Z with Z ~ N(0, 1) drawn from rng. Throws DomainError if x
// is outside S inflated by the margin.
double noisy_observe(const Objective& obj, const DecisionSpace& space, std::span<const double> x,
                     const NoiseModel& noise, Rng& rng);

struct BetaCheck {
  bool ok = false;
  double bound = 0.0;  // d / alpha
};

// beta <= d / alpha with 1e-12 slack.
BetaCheck check_beta_bound(double alpha, double beta, std::size_t d);

// Throws GuardViolation("beta exceeds d/alpha ...") when check_beta_bound fails.
void require_beta_bound(double alpha, double beta, std::size_t d);

struct SmoothnessOptions {
  std::size_t samples = 200;      // centers x drawn uniformly in S
  std::size_t ladder_levels = 8;  // side lengths max_length * 2^-r, r < levels
  std::optional<double> max_length;  // defaults to the space margin
  double relative_se = 0.01;  // stop when SE / a^alpha < relative_se * running max
  std::size_t max_pairs = std::size_t{1} << 17;
};

// Estimate of M in |avg_{B(x,a)} f - f(x)| <= M a^alpha: the maximum ratio
// over sampled centers and a dyadic ladder of side lengths. Cube averages
// use antithetic Monte Carlo pairs x +- u.
double estimate_smoothness(const Objective& obj, double alpha, const DecisionSpace& space,
                           Rng& rng, const SmoothnessOptions& options = {});

// Slope of log(count * a^d) against log(eps), where count is the number of
// grid cells of side grid_a whose center has f < f* + eps. Throws
// InsufficientData unless at least three distinct nonzero counts occur.
double estimate_beta(const Objective& obj, const DecisionSpace& space, double grid_a,
                     std::span<const double> eps_ladder);

}  // namespace binsplit
