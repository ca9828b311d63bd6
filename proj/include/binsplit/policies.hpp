#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "binsplit/core.hpp"
#include "binsplit/random.hpp"

namespace binsplit {

// Empirical mean minus sqrt(8 ln t / n); -inf for an unvisited bin. t is the
// time index (real-valued so the formula can be probed off the integers).
double simple_lcb(double loss_sum, std::int64_t n, double t);

// Empirical mean minus the bias correction mu * length^alpha and the noise
// width ln(t) / sqrt(n); -inf for an unvisited bin.
double adaptive_lcb(double loss_sum, std::int64_t n, double t, double length, double mu,
                    double alpha);

// Maximum number of queries a bin at split depth k absorbs before it is
// split: ceil(2^(2 alpha k)), saturating at INT64_MAX.
std::int64_t capacity(int k, double alpha);

// Index of a minimal entry. Ties, including several -inf entries, are broken
// uniformly at random; rng is only consumed when a tie exists.
std::size_t select_arm(std::span<const double> lcb_values, Rng& rng);

struct MuCheck {
  bool ok = false;
  double threshold = 0.0;  // (1 + 2^(d+alpha)) M
};

// Sufficient condition mu > (1 + 2^(d+alpha)) M for the adaptive regret bound.
MuCheck validate_mu(double mu, double M, std::size_t d, double alpha);

// 1.01 times the validate_mu threshold.
double default_mu(double M, std::size_t d, double alpha);

enum class PolicyKind { simple, adaptive };

std::string to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& name);

struct PolicySpec {
  PolicyKind kind = PolicyKind::adaptive;
  // simple: bin length of the fixed grid.
  double a = 0.0;
  // adaptive: initial bin length; defaults to the longest side of S.
  std::optional<double> a0;
  // adaptive: smoothness exponent used for capacities and bias correction.
  // When alpha is uncertain, choose a value below the believed true one.
  double alpha = 1.0;
  // adaptive: bias-correction coefficient. If unset, derived from
  // assumption_M via default_mu.
  std::optional<double> mu;
  std::optional<double> assumption_M;

  // Throws ConfigError with a "policy.*" field path.
  void validate() const;
};

// Ask/tell interface shared by both policies: step() returns the next query,
// observe() reports its loss. Calls must strictly alternate.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual Point step(Rng& rng) = 0;
  virtual void observe(double y) = 0;

  // 1-based index of the next query.
  virtual std::int64_t time() const noexcept = 0;
  virtual bool pending() const noexcept = 0;
  virtual PolicyKind kind() const noexcept = 0;
};

// Fixed grid of bins; every query is the center of the bin with the lowest
// simple_lcb value.
class SimplePolicy final : public Policy {
 public:
  SimplePolicy(const DecisionSpace& space, double a);

  Point step(Rng& rng) override;
  void observe(double y) override;

  std::int64_t time() const noexcept override { return t_; }
  bool pending() const noexcept override { return pending_.has_value(); }
  PolicyKind kind() const noexcept override { return PolicyKind::simple; }

  const std::vector<Bin>& bins() const noexcept { return bins_; }
  const std::vector<double>& lcb_values() const noexcept { return lcb_; }
  // Bin chosen by the last step(), if its observation is outstanding.
  std::optional<std::size_t> pending_bin() const noexcept { return pending_; }

 private:
  std::vector<Bin> bins_;
  std::vector<double> lcb_;
  std::vector<double> inv_sqrt_count_;
  std::int64_t t_ = 1;
  std::optional<std::size_t> pending_;
};

// Adaptive splitting: bins of depth k hold at most capacity(k, alpha)
// queries; selecting a full bin splits it into 2^d half-length children.
// Queries are uniform inside the selected bin.
class AdaptivePolicy final : public Policy {
 public:
  AdaptivePolicy(const DecisionSpace& space, double a0, double alpha, double mu);

  Point step(Rng& rng) override;
  void observe(double y) override;

  std::int64_t time() const noexcept override { return t_; }
  bool pending() const noexcept override { return pending_.has_value(); }
  PolicyKind kind() const noexcept override { return PolicyKind::adaptive; }

  double a0() const noexcept { return a0_; }
  double alpha() const noexcept { return alpha_; }
  double mu() const noexcept { return mu_; }

  // Selectable bins. Their order is an implementation detail but is
  // deterministic for a given history.
  const std::vector<Bin>& live_bins() const noexcept { return live_; }
  const std::vector<double>& lcb_values() const noexcept { return lcb_; }
  // Bins retired by splitting, with the statistics they held at split time.
  const std::vector<Bin>& archive() const noexcept { return archive_; }
  std::optional<std::size_t> pending_bin() const noexcept { return pending_; }
  // True if the last step() split a bin.
  bool last_step_split() const noexcept { return last_split_; }

 private:
  void refresh_lcb(std::int64_t t);

  std::vector<Bin> live_;
  std::vector<double> lcb_;
  std::vector<double> bias_;
  std::vector<double> inv_sqrt_count_;
  std::vector<Bin> archive_;
  double a0_;
  double alpha_;
  double mu_;
  std::int64_t t_ = 1;
  std::optional<std::size_t> pending_;
  bool last_split_ = false;
};

// Resolves defaults (a0, mu) against the space and builds the policy.
std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const DecisionSpace& space);

// Resolved mu for an adaptive spec: explicit value, else default_mu(M).
double resolve_mu(const PolicySpec& spec, std::size_t dim);

}  // namespace binsplit
