#include "binsplit/cli/commands.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include "binsplit/analysis.hpp"
#include "binsplit/errors.hpp"
#include "binsplit/harness.hpp"

namespace binsplit::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, result.ptr);
}

namespace {

constexpr const char* kSeedScheme =
    "replication i: derive_seed(master, i); policy stream: derive_seed(run, 0); noise stream: "
    "derive_seed(run, 1); derive_seed(p, i) = splitmix64(p ^ splitmix64(i + 1))";

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

json summary_json(const RunSummary& s) {
  return {{"replications", s.replications},
          {"horizon", s.horizon},
          {"mean_regret", s.mean_regret},
          {"stderr_regret", s.stderr_regret},
          {"mean_average_regret", s.mean_average_regret},
          {"stderr_average_regret", s.stderr_average_regret},
          {"finals", s.finals}};
}

json seeds_json(const ExperimentConfig& ex, const std::vector<std::uint64_t>& seeds) {
  return {{"master", ex.seed}, {"scheme", kSeedScheme}, {"replications", seeds}};
}

Objective checked_objective(const ExperimentConfig& ex) {
  Objective obj = make_objective(ex.objective, ex.space);
  if (const auto& params = obj.assumption()) require_beta_bound(params->alpha, params->beta, obj.dim());
  return obj;
}

json policy_notes(const ExperimentConfig& ex, const Objective& obj, std::ostream& log) {
  json notes = json::object();
  if (ex.policy.kind != PolicyKind::adaptive) return notes;
  const double mu = resolve_mu(ex.policy, ex.space.dim());
  notes["mu"] = mu;
  if (const auto& params = obj.assumption()) {
    const MuCheck check = validate_mu(mu, params->M, ex.space.dim(), ex.policy.alpha);
    notes["mu_check"] = {{"ok", check.ok}, {"threshold", check.threshold}, {"M", params->M}};
    if (!check.ok) {
      log << "warning: mu=" << format_double(mu) << " does not exceed (1+2^(d+alpha))M = "
          << format_double(check.threshold) << "; the regret guarantee does not apply\n";
    }
    if (ex.policy.alpha > params->alpha) {
      log << "warning: policy.alpha=" << format_double(ex.policy.alpha)
          << " exceeds the objective's smoothness " << format_double(params->alpha)
          << "; choose a value at or below the true smoothness\n";
    }
  }
  notes["alpha_guidance"] = "if the smoothness exponent is uncertain, set policy.alpha below the believed value";
  return notes;
}

json artifact_header(const Config& cfg, const std::string& command) {
  return {{"format_version", kFormatVersion}, {"command", command}, {"config", echo_config(cfg)}};
}

void write_trace_csv(const fs::path& path, const RegretTrace& trace, TraceDetail detail, std::size_t dim) {
  std::string text;
  if (detail == TraceDetail::full) {
    text += "t";
    for (std::size_t i = 0; i < dim; ++i) text += ",x" + std::to_string(i);
    text += ",y,regret,cumulative\n";
    for (std::size_t k = 0; k < trace.steps.size(); ++k) {
      const StepRecord& s = trace.steps[k];
      text += std::to_string(s.t);
      for (double xi : s.x) text += "," + format_double(xi);
      text += "," + format_double(s.y) + "," + format_double(s.regret) + "," +
              format_double(trace.cumulative[k]) + "\n";
    }
  } else {
    text += "t,cumulative\n";
    for (std::size_t k = 0; k < trace.cumulative.size(); ++k)
      text += std::to_string(k + 1) + "," + format_double(trace.cumulative[k]) + "\n";
  }
  write_text(path, text);
}

}  // namespace

Config load_config(const CommandOptions& opts) {
  json doc = load_json(opts.config_path);
  if (opts.seed) doc["seed"] = *opts.seed;
  if (opts.threads) doc["threads"] = *opts.threads;
  for (const auto& assignment : opts.overrides) apply_override(doc, assignment);
  return parse_config(doc);
}

json cmd_run(const Config& cfg, const fs::path& out_dir, std::ostream& log) {
  const ExperimentConfig& ex = cfg.experiment;
  ex.validate();
  const Objective obj = checked_objective(ex);
  json artifact = artifact_header(cfg, "run");
  artifact["policy_notes"] = policy_notes(ex, obj, log);
  fs::create_directories(out_dir);

  RunSummary summary;
  if (ex.detail == TraceDetail::none) {
    summary = replicate(ex);
  } else {
    std::vector<double> finals;
    std::vector<std::uint64_t> seeds;
    for (std::size_t i = 0; i < ex.replications; ++i) {
      const std::uint64_t seed = replication_seed(ex.seed, i);
      const RegretTrace trace = run_experiment(ex, obj, seed);
      write_trace_csv(out_dir / ("trace_" + std::to_string(i) + ".csv"), trace, ex.detail, ex.space.dim());
      finals.push_back(trace.final_regret);
      seeds.push_back(seed);
    }
    summary = summarize(finals, ex.horizon);
    summary.seeds = seeds;
  }

  artifact["seeds"] = seeds_json(ex, summary.seeds);
  artifact["summary"] = summary_json(summary);
  write_json(out_dir / "summary.json", artifact);
  log << "run: " << ex.replications << " replication(s), T=" << ex.horizon
      << ", mean R_T=" << format_double(summary.mean_regret) << " (stderr "
      << format_double(summary.stderr_regret) << ")\n";
  return artifact;
}

json cmd_sweep(const Config& cfg, const fs::path& out_dir, std::ostream& log) {
  const ExperimentConfig& ex = cfg.experiment;
  if (cfg.sweep.lengths.empty()) throw ConfigError("sweep.lengths", "must list at least one bin length");
  ex.validate();
  const Objective obj = checked_objective(ex);
  json artifact = artifact_header(cfg, "sweep");
  artifact["policy_notes"] = policy_notes(ex, obj, log);
  fs::create_directories(out_dir);

  const SweepResult result = sweep_bin_sizes(ex, cfg.sweep.lengths);

  std::string csv = "policy,a,mean_regret,stderr,mean_average_regret\n";
  json rows = json::array();
  for (const SweepRow& row : result.simple) {
    csv += "simple," + format_double(row.a) + "," + format_double(row.summary.mean_regret) + "," +
           format_double(row.summary.stderr_regret) + "," + format_double(row.summary.mean_average_regret) + "\n";
    rows.push_back({{"policy", "simple"}, {"a", row.a}, {"summary", summary_json(row.summary)}});
  }
  csv += "adaptive," + format_double(result.adaptive_a0) + "," + format_double(result.adaptive.mean_regret) +
         "," + format_double(result.adaptive.stderr_regret) + "," +
         format_double(result.adaptive.mean_average_regret) + "\n";
  rows.push_back({{"policy", "adaptive"},
                  {"a", result.adaptive_a0},
                  {"mu", result.adaptive_mu},
                  {"summary", summary_json(result.adaptive)}});
  write_text(out_dir / "sweep.csv", csv);

  artifact["seeds"] = seeds_json(ex, result.adaptive.seeds);
  artifact["rows"] = rows;
  write_json(out_dir / "sweep.json", artifact);
  log << "sweep: " << result.simple.size() << " simple lengths + adaptive reference written to "
      << (out_dir / "sweep.csv").string() << "\n";
  return artifact;
}

json cmd_rate(const Config& cfg, const fs::path& out_dir, std::ostream& log) {
  const ExperimentConfig& ex = cfg.experiment;
  const auto& horizons = cfg.rate.horizons;
  if (horizons.size() < 3) throw ConfigError("rate.horizons", "needs at least 3 horizons");
  {
    // A simple policy's length is set per horizon below.
    ExperimentConfig probe = ex;
    if (probe.policy.kind == PolicyKind::simple && probe.policy.a == 0.0) probe.policy.a = 1.0;
    probe.validate();
  }
  const Objective obj = checked_objective(ex);
  const auto& params = obj.assumption();
  const std::size_t d = ex.space.dim();

  if (ex.policy.kind == PolicyKind::simple && !cfg.rate.simple_length && !params)
    throw ConfigError("rate.simple_length", "objective declares no assumption parameters; give a numeric length");

  auto policy_for = [&](std::int64_t T) {
    PolicySpec p = ex.policy;
    if (p.kind == PolicyKind::simple) {
      // The fixed-grid bound only improves with beta up to 1.
      p.a = cfg.rate.simple_length.value_or(
          optimal_bin_length(params->alpha, std::min(params->beta, 1.0), d, T, ex.space.max_side()));
    }
    return p;
  };
  for (const std::int64_t T : horizons) policy_for(T).validate();

  json artifact = artifact_header(cfg, "rate");
  artifact["policy_notes"] = policy_notes(ex, obj, log);
  fs::create_directories(out_dir);

  const auto ladder = regret_ladder(ex, horizons, policy_for);

  std::string csv = "horizon,a,mean_average_regret,stderr_average_regret,mean_regret\n";
  std::vector<RatePoint> points;
  json rows = json::array();
  for (const LadderPoint& p : ladder) {
    const double a = p.policy.kind == PolicyKind::simple ? p.policy.a : p.policy.a0.value_or(ex.space.max_side());
    csv += std::to_string(p.horizon) + "," + format_double(a) + "," + format_double(p.summary.mean_average_regret) +
           "," + format_double(p.summary.stderr_average_regret) + "," + format_double(p.summary.mean_regret) + "\n";
    points.push_back({static_cast<double>(p.horizon), p.summary.mean_average_regret});
    rows.push_back({{"horizon", p.horizon}, {"a", a}, {"summary", summary_json(p.summary)}});
  }
  write_text(out_dir / "rate.csv", csv);

  const RateFit fit = fit_rate(points, cfg.rate.log_power);
  json theory = nullptr;
  if (params) {
    const RatePrediction pred = ex.policy.kind == PolicyKind::adaptive ? rate_adaptive(params->alpha, params->beta, d)
                                                                        : rate_simple(params->alpha, params->beta, d);
    theory = {{"source", to_string(pred.source)},
              {"exponent", pred.exponent},
              {"log_power", pred.log_power},
              {"slope", -pred.exponent},
              {"cumulative_exponent", pred.cumulative_exponent()}};
  }
  json verdict = nullptr;
  if (cfg.rate.band_low) verdict = fit.slope >= *cfg.rate.band_low && fit.slope <= *cfg.rate.band_high;

  artifact["rows"] = rows;
  artifact["fit"] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"rms_residual", fit.rms_residual},
                     {"log_power", cfg.rate.log_power ? json(*cfg.rate.log_power) : json(nullptr)}};
  artifact["theory"] = theory;
  artifact["pass"] = verdict;
  write_json(out_dir / "rate.json", artifact);

  log << "rate: fitted slope " << format_double(fit.slope);
  if (params) log << " (theory " << format_double(theory["slope"].get<double>()) << ")";
  if (cfg.rate.band_low)
    log << ", band [" << format_double(*cfg.rate.band_low) << ", " << format_double(*cfg.rate.band_high)
        << "]: " << (verdict.get<bool>() ? "PASS" : "FAIL");
  log << "\n";
  return artifact;
}

json cmd_diagnose(const Config& cfg, const fs::path& out_dir, std::ostream& log) {
  const ExperimentConfig& ex = cfg.experiment;
  const Objective obj = make_objective(ex.objective, ex.space);
  const DiagnoseSettings& dg = cfg.diagnose;
  const std::size_t d = ex.space.dim();

  const double alpha = dg.alpha.value_or(obj.assumption() ? obj.assumption()->alpha : ex.policy.alpha);
  Rng rng(derive_seed(ex.seed, 2));
  const double m_hat = estimate_smoothness(obj, alpha, ex.space, rng, dg.smoothness);

  const double grid_a =
      dg.grid_a.value_or(ex.space.max_side() * std::exp2(-std::floor(21.0 / static_cast<double>(d))));
  std::vector<double> eps = dg.eps_ladder;
  if (eps.empty())
    for (int k = 0; k <= 8; ++k) eps.push_back(std::exp2(-k));
  const double beta_hat = estimate_beta(obj, ex.space, grid_a, eps);

  const BetaCheck guard = check_beta_bound(alpha, beta_hat, d);
  const MuCheck mu = validate_mu(ex.policy.mu.value_or(0.0), m_hat, d, alpha);

  json report = artifact_header(cfg, "diagnose");
  report["diagnostics"] = {{"alpha", alpha},
                           {"M_hat", m_hat},
                           {"beta_hat", beta_hat},
                           {"grid_a", grid_a},
                           {"eps_ladder", eps},
                           {"beta_bound", guard.bound},
                           {"beta_within_bound", guard.ok},
                           {"mu_threshold", mu.threshold}};
  if (obj.assumption()) {
    const auto& p = *obj.assumption();
    const BetaCheck declared = check_beta_bound(p.alpha, p.beta, d);
    report["declared"] = {{"alpha", p.alpha}, {"beta", p.beta}, {"M", p.M}, {"beta_within_bound", declared.ok}};
  }
  fs::create_directories(out_dir);
  write_json(out_dir / "diagnose.json", report);

  log << "diagnose " << obj.name() << " (d=" << d << ", alpha=" << format_double(alpha) << ")\n"
      << "  M_hat        " << format_double(m_hat) << "\n"
      << "  beta_hat     " << format_double(beta_hat) << "\n"
      << "  beta bound   d/alpha = " << format_double(guard.bound) << (guard.ok ? " (ok)" : " (violated)") << "\n"
      << "  mu threshold (1+2^(d+alpha)) M_hat = " << format_double(mu.threshold) << "\n";
  return report;
}

int run_command(const std::string& command, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const Config cfg = load_config(opts);
    if (command == "run") {
      cmd_run(cfg, opts.out_dir, out);
    } else if (command == "sweep") {
      cmd_sweep(cfg, opts.out_dir, out);
    } else if (command == "rate") {
      cmd_rate(cfg, opts.out_dir, out);
    } else if (command == "diagnose") {
      cmd_diagnose(cfg, opts.out_dir, out);
    } else {
      err << "error: unknown command '" << command << "'\n";
      return kConfigError;
    }
    return kSuccess;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const GuardViolation& e) {
    err << "guard violation: " << e.what() << "\n";
    return kGuardViolation;
  } catch (const InsufficientData& e) {
    err << "insufficient data: " << e.what() << "\n";
    return kRuntimeFailure;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << "\n";
    return kRuntimeFailure;
  }
}

}  // namespace binsplit::cli
