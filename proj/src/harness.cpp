#include "binsplit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "binsplit/errors.hpp"
#include "binsplit/stats.hpp"

namespace binsplit {

void ExperimentConfig::validate() const {
  if (horizon < 1) throw ConfigError("horizon", "must be at least 1");
  if (replications < 1) throw ConfigError("replications", "must be at least 1");
  if (!(noise.scale >= 0.0)) throw ConfigError("noise.scale", "must be nonnegative");
  if (objective.dim != space.dim())
    throw ConfigError("objective.dim", "does not match the dimension of space");
  policy.validate();
}

RegretTrace run_experiment(const ExperimentConfig& cfg, const Objective& objective, std::uint64_t seed) {
  if (const auto& params = objective.assumption())
    require_beta_bound(params->alpha, params->beta, objective.dim());

  auto policy = make_policy(cfg.policy, cfg.space);
  Rng policy_rng(policy_stream_seed(seed));
  Rng noise_rng(noise_stream_seed(seed));

  RegretTrace trace;
  trace.seed = seed;
  trace.horizon = cfg.horizon;
  if (cfg.detail != TraceDetail::none) trace.cumulative.reserve(static_cast<std::size_t>(cfg.horizon));
  if (cfg.detail == TraceDetail::full) trace.steps.reserve(static_cast<std::size_t>(cfg.horizon));

  double total = 0.0;
  for (std::int64_t t = 1; t <= cfg.horizon; ++t) {
    Point x = policy->step(policy_rng);
    const double y = noisy_observe(objective, cfg.space, x, cfg.noise, noise_rng);
    policy->observe(y);

    const double regret = objective.gap(x);
    total += regret;
    if (cfg.detail != TraceDetail::none) trace.cumulative.push_back(total);
    if (cfg.detail == TraceDetail::full) trace.steps.push_back({t, std::move(x), y, regret});
  }
  trace.final_regret = total;
  return trace;
}

RegretTrace run_experiment(const ExperimentConfig& cfg, std::uint64_t seed) {
  return run_experiment(cfg, make_objective(cfg.objective, cfg.space), seed);
}

RunSummary summarize(std::span<const double> finals, std::int64_t horizon) {
  RunSummary s;
  s.replications = finals.size();
  s.horizon = horizon;
  s.finals.assign(finals.begin(), finals.end());
  // Sorted copy so the aggregate does not depend on replication order.
  std::vector<double> sorted = s.finals;
  std::sort(sorted.begin(), sorted.end());
  s.mean_regret = mean(sorted);
  s.stderr_regret = standard_error(sorted);
  const double T = static_cast<double>(horizon);
  s.mean_average_regret = s.mean_regret / T;
  s.stderr_average_regret = s.stderr_regret / T;
  return s;
}

RunSummary replicate(const ExperimentConfig& cfg) {
  cfg.validate();
  const Objective objective = make_objective(cfg.objective, cfg.space);

  const std::size_t n = cfg.replications;
  std::vector<double> finals(n, 0.0);
  std::vector<std::uint64_t> seeds(n);
  for (std::size_t i = 0; i < n; ++i) seeds[i] = replication_seed(cfg.seed, i);

  ExperimentConfig run_cfg = cfg;
  run_cfg.detail = TraceDetail::none;

  std::size_t workers = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
  workers = std::min(workers, n);

  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) finals[i] = run_experiment(run_cfg, objective, seeds[i]).final_regret;
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            finals[i] = run_experiment(run_cfg, objective, seeds[i]).final_regret;
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }

  RunSummary summary = summarize(finals, cfg.horizon);
  summary.seeds = std::move(seeds);
  return summary;
}

SweepResult sweep_bin_sizes(const ExperimentConfig& base, std::span<const double> lengths) {
  if (lengths.empty()) throw ConfigError("sweep.lengths", "must list at least one bin length");
  if (base.policy.kind != PolicyKind::adaptive)
    throw ConfigError("policy.kind", "sweep uses the configured adaptive policy as its reference row");

  SweepResult result;
  // Reject any invalid length before spending time on the others.
  for (double a : lengths) (void)grid_shape(base.space, a);
  for (double a : lengths) {
    ExperimentConfig cfg = base;
    cfg.policy = PolicySpec{};
    cfg.policy.kind = PolicyKind::simple;
    cfg.policy.a = a;
    result.simple.push_back({a, replicate(cfg)});
  }
  result.adaptive = replicate(base);
  result.adaptive_a0 = base.policy.a0.value_or(base.space.max_side());
  result.adaptive_mu = resolve_mu(base.policy, base.space.dim());
  return result;
}

std::vector<LadderPoint> regret_ladder(const ExperimentConfig& base, std::span<const std::int64_t> horizons,
                                       const std::function<PolicySpec(std::int64_t)>& policy_for) {
  std::vector<LadderPoint> points;
  points.reserve(horizons.size());
  for (std::int64_t T : horizons) {
    ExperimentConfig cfg = base;
    cfg.horizon = T;
    cfg.policy = policy_for(T);
    points.push_back({T, cfg.policy, replicate(cfg)});
  }
  return points;
}

}  // namespace binsplit
