#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "binsplit/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Bin-splitting LCB policies for noisy black-box minimization"};
  app.require_subcommand(1);

  binsplit::cli::CommandOptions opts;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  const std::pair<const char*, const char*> commands[] = {
      {"run", "Run replications of one configuration and write summary and traces"},
      {"sweep", "Simple-policy regret versus bin length, plus the adaptive reference row"},
      {"rate", "Average regret over a horizon ladder and its fitted log-log slope"},
      {"diagnose", "Estimate smoothness and sublevel-set exponents of the objective"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config_path, "Configuration file (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--seed", seed, "Master seed (overrides the config)");
    sub->add_option("--set", opts.overrides, "Override a config field: dotted.path=value")->take_all();
    sub->add_option("--threads", threads, "Worker threads for replications (0 = all cores)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : binsplit::cli::kConfigError;
  }

  CLI::App* chosen = app.get_subcommands().front();
  opts.out_dir = out_dir;
  if (chosen->count("--seed")) opts.seed = seed;
  if (chosen->count("--threads")) opts.threads = threads;
  return binsplit::cli::run_command(chosen->get_name(), opts, std::cout, std::cerr);
}
