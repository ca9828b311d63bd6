#include "binsplit/policies.hpp"

#include <cmath>
#include <limits>

#include "binsplit/errors.hpp"

namespace binsplit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_time(std::int64_t t) { return std::log(static_cast<double>(t)); }

}  // namespace

double simple_lcb(double loss_sum, std::int64_t n, double t) {
  if (n == 0) return kNegInf;
  const double nd = static_cast<double>(n);
  return loss_sum / nd - std::sqrt(8.0 * std::log(t) / nd);
}

double adaptive_lcb(double loss_sum, std::int64_t n, double t, double length, double mu,
                    double alpha) {
  if (n == 0) return kNegInf;
  const double nd = static_cast<double>(n);
  return loss_sum / nd - mu * std::pow(length, alpha) - std::log(t) / std::sqrt(nd);
}

std::int64_t capacity(int k, double alpha) {
  const double exponent = 2.0 * alpha * static_cast<double>(k);
  if (exponent >= 62.0) return std::numeric_limits<std::int64_t>::max();
  return static_cast<std::int64_t>(std::ceil(std::exp2(exponent)));
}

std::size_t select_arm(std::span<const double> lcb_values, Rng& rng) {
  const std::size_t n = lcb_values.size();
  std::size_t best = 0;
  std::size_t ties = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (lcb_values[i] < lcb_values[best]) {
      best = i;
      ties = 1;
    } else if (lcb_values[i] == lcb_values[best]) {
      ++ties;
    }
  }
  if (ties == 1) return best;

  std::size_t pick = rng.index(ties);
  const double target = lcb_values[best];
  for (std::size_t i = best; i < n; ++i) {
    if (lcb_values[i] == target && pick-- == 0) return i;
  }
  return best;  // unreachable
}

MuCheck validate_mu(double mu, double M, std::size_t d, double alpha) {
  const double threshold = (1.0 + std::exp2(static_cast<double>(d) + alpha)) * M;
  return {mu > threshold, threshold};
}

double default_mu(double M, std::size_t d, double alpha) {
  return 1.01 * validate_mu(0.0, M, d, alpha).threshold;
}

std::string to_string(PolicyKind kind) {
  return kind == PolicyKind::simple ? "simple" : "adaptive";
}

PolicyKind policy_kind_from_string(const std::string& name) {
  if (name == "simple") return PolicyKind::simple;
  if (name == "adaptive") return PolicyKind::adaptive;
  throw ConfigError("policy.kind", "unknown policy '" + name + "' (expected simple or adaptive)");
}

void PolicySpec::validate() const {
  if (kind == PolicyKind::simple) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("policy.a", "bin length must be positive");
    return;
  }
  if (a0 && (!(*a0 > 0.0) || !std::isfinite(*a0)))
    throw ConfigError("policy.a0", "initial bin length must be positive");
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ConfigError("policy.alpha", "must lie in (0, 2]");
  if (mu && (!(*mu > 0.0) || !std::isfinite(*mu))) throw ConfigError("policy.mu", "must be positive");
  if (assumption_M && !(*assumption_M > 0.0)) throw ConfigError("policy.M", "must be positive");
  if (!mu && !assumption_M)
    throw ConfigError("policy.mu", "required when no smoothness constant M is supplied");
}

// ---------------------------------------------------------------- simple

SimplePolicy::SimplePolicy(const DecisionSpace& space, double a)
    : bins_(make_grid(space, a)),
      lcb_(bins_.size(), kNegInf),
      inv_sqrt_count_(bins_.size(), 0.0) {}

Point SimplePolicy::step(Rng& rng) {
  if (pending_) throw ProtocolError("SimplePolicy::step called twice without observe");
  const std::size_t j = select_arm(lcb_, rng);
  pending_ = j;
  return bin_center(bins_[j]);
}

void SimplePolicy::observe(double y) {
  if (!pending_) throw ProtocolError("SimplePolicy::observe called without a pending query");
  const std::size_t j = *pending_;
  bins_[j].record(t_, y);
  inv_sqrt_count_[j] = 1.0 / std::sqrt(static_cast<double>(bins_[j].count));

  const double width = std::sqrt(8.0 * log_time(t_));
  for (std::size_t i = 0; i < bins_.size(); ++i) {
    if (bins_[i].count > 0) lcb_[i] = bins_[i].mean() - width * inv_sqrt_count_[i];
  }
  pending_.reset();
  ++t_;
}

// -------------------------------------------------------------- adaptive

AdaptivePolicy::AdaptivePolicy(const DecisionSpace& space, double a0, double alpha, double mu)
    : live_(make_grid(space, a0)), a0_(a0), alpha_(alpha), mu_(mu) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ConfigError("policy.alpha", "must lie in (0, 2]");
  if (!(mu > 0.0)) throw ConfigError("policy.mu", "must be positive");
  lcb_.assign(live_.size(), kNegInf);
  bias_.assign(live_.size(), mu_ * std::pow(a0_, alpha_));
  inv_sqrt_count_.assign(live_.size(), 0.0);
}

Point AdaptivePolicy::step(Rng& rng) {
  if (pending_) throw ProtocolError("AdaptivePolicy::step called twice without observe");
  const std::size_t j = select_arm(lcb_, rng);

  if (live_[j].count < capacity(live_[j].depth, alpha_)) {
    last_split_ = false;
    pending_ = j;
    return sample_uniform(live_[j], rng);
  }

  // Full bin: replace it by its children and query uniformly over the
  // parent's extent, attributing the query to the child that contains it.
  last_split_ = true;
  std::vector<Bin> children = split_bin(live_[j]);
  Point x = sample_uniform(live_[j], rng);
  const std::size_t l = locate_child(children, x);

  archive_.push_back(std::move(live_[j]));
  const double child_bias = mu_ * std::pow(children.front().length, alpha_);

  // Reuse slot j for the first child, append the rest.
  const std::size_t first = live_.size();
  live_[j] = std::move(children[0]);
  lcb_[j] = kNegInf;
  bias_[j] = child_bias;
  inv_sqrt_count_[j] = 0.0;
  for (std::size_t c = 1; c < children.size(); ++c) {
    live_.push_back(std::move(children[c]));
    lcb_.push_back(kNegInf);
    bias_.push_back(child_bias);
    inv_sqrt_count_.push_back(0.0);
  }
  pending_ = (l == 0) ? j : first + (l - 1);
  return x;
}

void AdaptivePolicy::observe(double y) {
  if (!pending_) throw ProtocolError("AdaptivePolicy::observe called without a pending query");
  Bin& bin = live_[*pending_];
  bin.record(t_, y);
  inv_sqrt_count_[*pending_] = 1.0 / std::sqrt(static_cast<double>(bin.count));
  refresh_lcb(t_);
  pending_.reset();
  ++t_;
}

void AdaptivePolicy::refresh_lcb(std::int64_t t) {
  const double lt = log_time(t);
  for (std::size_t i = 0; i < live_.size(); ++i) {
    if (live_[i].count > 0) lcb_[i] = live_[i].mean() - bias_[i] - lt * inv_sqrt_count_[i];
  }
}

// --------------------------------------------------------------- factory

double resolve_mu(const PolicySpec& spec, std::size_t dim) {
  if (spec.mu) return *spec.mu;
  if (spec.assumption_M) return default_mu(*spec.assumption_M, dim, spec.alpha);
  throw ConfigError("policy.mu", "required when no smoothness constant M is supplied");
}

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const DecisionSpace& space) {
  spec.validate();
  if (spec.kind == PolicyKind::simple) return std::make_unique<SimplePolicy>(space, spec.a);
  const double a0 = spec.a0.value_or(space.max_side());
  return std::make_unique<AdaptivePolicy>(space, a0, spec.alpha, resolve_mu(spec, space.dim()));
}

}  // namespace binsplit
