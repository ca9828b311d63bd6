#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "binsplit/core.hpp"
#include "binsplit/objectives.hpp"
#include "binsplit/policies.hpp"

namespace binsplit {

enum class TraceDetail {
  none,        // final regret only
  cumulative,  // R_t series
  full,        // R_t series plus every query, observation and gap
};

struct ExperimentConfig {
  ObjectiveSpec objective;
  DecisionSpace space = DecisionSpace::cube(1, -1.0, 1.0);
  PolicySpec policy;
  std::int64_t horizon = 10000;
  NoiseModel noise;
  std::uint64_t seed = 1;
  std::size_t replications = 1;
  TraceDetail detail = TraceDetail::none;
  std::size_t threads = 1;  // 0: one per hardware thread

  // Throws ConfigError for invalid fields.
  void validate() const;
};

struct StepRecord {
  std::int64_t t = 0;
  Point x;
  double y = 0.0;
  double regret = 0.0;  // f(x_t) - f(x*), never the noisy y
};

struct RegretTrace {
  std::uint64_t seed = 0;
  std::int64_t horizon = 0;
  double final_regret = 0.0;
  std::vector<double> cumulative;  // cumulative[t-1] = R_t
  std::vector<StepRecord> steps;
};

struct RunSummary {
  std::size_t replications = 0;
  std::int64_t horizon = 0;
  double mean_regret = 0.0;      // mean of final R_T
  double stderr_regret = 0.0;
  double mean_average_regret = 0.0;  // mean of R_T / T
  double stderr_average_regret = 0.0;
  std::vector<double> finals;          // per replication, in replication order
  std::vector<std::uint64_t> seeds;    // derive_seed(master, i)
};

// Stream layout of a run seed: the policy's tie-breaking and sampling
// stream, and the observation-noise stream.
inline std::uint64_t policy_stream_seed(std::uint64_t run_seed) { return derive_seed(run_seed, 0); }
inline std::uint64_t noise_stream_seed(std::uint64_t run_seed) { return derive_seed(run_seed, 1); }

// Seed of replication i under master seed `master`.
inline std::uint64_t replication_seed(std::uint64_t master, std::size_t i) { return derive_seed(master, i); }

RegretTrace run_experiment(const ExperimentConfig& cfg, const Objective& objective, std::uint64_t seed);
RegretTrace run_experiment(const ExperimentConfig& cfg, std::uint64_t seed);

// Aggregates final regrets of replications; order of `finals` only affects
// the stored per-replication list.
RunSummary summarize(std::span<const double> finals, std::int64_t horizon);

RunSummary replicate(const ExperimentConfig& cfg);

struct SweepRow {
  double a = 0.0;
  RunSummary summary;
};

struct SweepResult {
  std::vector<SweepRow> simple;
  RunSummary adaptive;
  double adaptive_a0 = 0.0;
  double adaptive_mu = 0.0;
};

// One replicate() per length with the simple policy, plus one for the
// adaptive policy configured in base.policy.
SweepResult sweep_bin_sizes(const ExperimentConfig& base, std::span<const double> lengths);

struct LadderPoint {
  std::int64_t horizon = 0;
  PolicySpec policy;
  RunSummary summary;
};

// replicate() at each horizon; policy_for(T) supplies the policy per horizon
// (e.g. a simple grid whose length depends on T).
std::vector<LadderPoint> regret_ladder(const ExperimentConfig& base, std::span<const std::int64_t> horizons,
                                       const std::function<PolicySpec(std::int64_t)>& policy_for);

}  // namespace binsplit
