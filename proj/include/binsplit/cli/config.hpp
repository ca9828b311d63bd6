#pragma once

// Configuration file schema shared by all subcommands. Files are JSON
// objects; unknown keys are rejected so typos fail loudly.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "binsplit/harness.hpp"

namespace binsplit::cli {

inline constexpr int kFormatVersion = 1;

struct SweepSettings {
  std::vector<double> lengths;
};

struct RateSettings {
  std::vector<std::int64_t> horizons;
  // simple policy: "optimal" picks the prescribed length per horizon.
  std::optional<double> simple_length;
  std::optional<double> log_power;
  std::optional<double> band_low;
  std::optional<double> band_high;
};

struct DiagnoseSettings {
  std::optional<double> alpha;  // defaults to the objective's alpha
  SmoothnessOptions smoothness;
  std::optional<double> grid_a;
  std::vector<double> eps_ladder;
};

struct Config {
  ExperimentConfig experiment;
  SweepSettings sweep;
  RateSettings rate;
  DiagnoseSettings diagnose;
};

// Applies "a.b.c=value" to the document. The value is parsed as JSON when
// possible, otherwise stored as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

nlohmann::json load_json(const std::string& path);

// Throws ConfigError with a dotted field path on any schema violation.
Config parse_config(const nlohmann::json& doc);

// Fully resolved document: every field explicit, defaults filled in. Parsing
// the echo yields the same configuration.
nlohmann::json echo_config(const Config& cfg);

TraceDetail trace_detail_from_string(const std::string& name);
std::string to_string(TraceDetail detail);

}  // namespace binsplit::cli
