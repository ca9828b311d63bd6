#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "binsplit/cli/config.hpp"

namespace binsplit::cli {

enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 2,
  kGuardViolation = 3,
  kRuntimeFailure = 4,
};

struct CommandOptions {
  std::string config_path;
  std::filesystem::path out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::vector<std::string> overrides;  // dotted.path=value
};

// Reads the config file and applies --seed, --threads and --set overrides.
Config load_config(const CommandOptions& opts);

// Each command writes its files into out_dir and returns the artifact
// document that was written as JSON.
nlohmann::json cmd_run(const Config& cfg, const std::filesystem::path& out_dir, std::ostream& log);
nlohmann::json cmd_sweep(const Config& cfg, const std::filesystem::path& out_dir, std::ostream& log);
nlohmann::json cmd_rate(const Config& cfg, const std::filesystem::path& out_dir, std::ostream& log);
nlohmann::json cmd_diagnose(const Config& cfg, const std::filesystem::path& out_dir, std::ostream& log);

// Dispatches a subcommand and maps exceptions to exit codes, printing a
// diagnostic to err.
int run_command(const std::string& command, const CommandOptions& opts, std::ostream& out, std::ostream& err);

// Shortest round-trip decimal representation, independent of locale.
std::string format_double(double value);

}  // namespace binsplit::cli
