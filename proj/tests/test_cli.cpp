#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "binsplit/cli/commands.hpp"
#include "binsplit/cli/config.hpp"
#include "binsplit/errors.hpp"

using namespace binsplit;
using namespace binsplit::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("binsplit_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

fs::path write_config(const fs::path& dir, const json& doc, const std::string& name = "config.json") {
  const fs::path p = dir / name;
  std::ofstream(p) << doc.dump(2);
  return p;
}

int run(const std::string& cmd, const fs::path& config, const fs::path& out, std::string* err_text = nullptr,
        std::vector<std::string> overrides = {}) {
  CommandOptions opts;
  opts.config_path = config.string();
  opts.out_dir = out;
  opts.overrides = std::move(overrides);
  std::ostringstream out_s;
  std::ostringstream err_s;
  const int code = run_command(cmd, opts, out_s, err_s);
  if (err_text) *err_text = err_s.str();
  return code;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

const json kMinimal = {{"objective", {{"name", "f1"}, {"dim", 1}}},
                       {"policy", {{"kind", "adaptive"}, {"alpha", 2}, {"mu", 1.0}}},
                       {"horizon", 100},
                       {"trace", "full"}};

}  // namespace

TEST_CASE("run writes a full trace and a summary") {
  TempDir dir;
  const auto cfg = write_config(dir.path, kMinimal);
  REQUIRE(run("run", cfg, dir.path / "out") == kSuccess);
  const auto lines = read_lines(dir.path / "out" / "trace_0.csv");
  REQUIRE(lines.size() == 101);
  CHECK(lines[0] == "t,x0,y,regret,cumulative");
  CHECK(lines[1].rfind("1,", 0) == 0);
  CHECK(lines[100].rfind("100,", 0) == 0);
  const json s = read_json(dir.path / "out" / "summary.json");
  CHECK(s["format_version"] == kFormatVersion);
  CHECK(s["command"] == "run");
  CHECK(s["summary"]["replications"] == 1);
  CHECK(s["config"]["policy"]["mu"] == 1.0);
}

TEST_CASE("rerunning from the echoed config reproduces the summary") {
  TempDir dir;
  json doc = kMinimal;
  doc["trace"] = "none";
  doc["replications"] = 4;
  doc["seed"] = 12345;
  REQUIRE(run("run", write_config(dir.path, doc), dir.path / "a") == kSuccess);
  const json first = read_json(dir.path / "a" / "summary.json");
  REQUIRE(run("run", write_config(dir.path, first["config"], "echo.json"), dir.path / "b") == kSuccess);
  const json second = read_json(dir.path / "b" / "summary.json");
  CHECK(first["summary"] == second["summary"]);
  CHECK(first["seeds"] == second["seeds"]);
  CHECK(first["config"] == second["config"]);
}

TEST_CASE("beta guard maps to exit code 3") {
  TempDir dir;
  json doc = kMinimal;
  doc["objective"]["dim"] = 2;
  doc["objective"]["assumption"] = {{"alpha", 2}, {"beta", 3}, {"M", 1}};
  std::string err;
  CHECK(run("run", write_config(dir.path, doc), dir.path / "out", &err) == kGuardViolation);
  CHECK(err.find("beta exceeds d/alpha") != std::string::npos);
}

TEST_CASE("unknown fields are config errors naming the field") {
  TempDir dir;
  json doc = kMinimal;
  doc["policy"]["mu_typo"] = 1.0;
  std::string err;
  CHECK(run("run", write_config(dir.path, doc), dir.path / "out", &err) == kConfigError);
  CHECK(err.find("policy.mu_typo") != std::string::npos);

  doc = kMinimal;
  doc["policy"].erase("mu");
  CHECK(run("run", write_config(dir.path, doc), dir.path / "out", &err) == kConfigError);
  CHECK(err.find("policy.mu") != std::string::npos);

  CHECK(run("run", dir.path / "missing.json", dir.path / "out") == kConfigError);
}

TEST_CASE("overrides") {
  json doc = kMinimal;
  apply_override(doc, "policy.mu=2.5");
  apply_override(doc, "objective.name=f2");
  apply_override(doc, "space.margin=0.25");
  apply_override(doc, "rate.horizons=[10,20,30]");
  CHECK(doc["policy"]["mu"] == 2.5);
  CHECK(doc["objective"]["name"] == "f2");
  CHECK(doc["space"]["margin"] == 0.25);
  CHECK(doc["rate"]["horizons"].size() == 3);
  CHECK_THROWS_AS(apply_override(doc, "no_equals_sign"), ConfigError);

  TempDir dir;
  const auto cfg = write_config(dir.path, kMinimal);
  REQUIRE(run("run", cfg, dir.path / "out", nullptr, {"horizon=7"}) == kSuccess);
  CHECK(read_lines(dir.path / "out" / "trace_0.csv").size() == 8);
}

TEST_CASE("sweep writes one row per length plus the adaptive row") {
  TempDir dir;
  json doc = kMinimal;
  doc["trace"] = "none";
  doc["objective"]["dim"] = 2;
  doc["replications"] = 2;
  doc["sweep"] = {{"lengths", {2, 1, 0.5, 0.25, 0.125}}};
  REQUIRE(run("sweep", write_config(dir.path, doc), dir.path / "out") == kSuccess);
  const auto lines = read_lines(dir.path / "out" / "sweep.csv");
  REQUIRE(lines.size() == 7);
  CHECK(lines[0] == "policy,a,mean_regret,stderr,mean_average_regret");
  CHECK(lines[1].rfind("simple,2,", 0) == 0);
  CHECK(lines[6].rfind("adaptive,", 0) == 0);

  doc["sweep"]["lengths"] = json::array();
  CHECK(run("sweep", write_config(dir.path, doc), dir.path / "out2") == kConfigError);
}

TEST_CASE("rate") {
  TempDir dir;
  json doc = kMinimal;
  doc["trace"] = "none";
  doc["replications"] = 2;
  doc["rate"] = {{"horizons", {100, 200}}};
  std::string err;
  CHECK(run("rate", write_config(dir.path, doc), dir.path / "out", &err) == kConfigError);
  CHECK(err.find("rate.horizons") != std::string::npos);

  doc["rate"]["horizons"] = {200, 400, 800, 1600};
  doc["rate"]["band"] = {-0.9, -0.1};
  REQUIRE(run("rate", write_config(dir.path, doc), dir.path / "out") == kSuccess);
  const auto lines = read_lines(dir.path / "out" / "rate.csv");
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "horizon,a,mean_average_regret,stderr_average_regret,mean_regret");
  const json r = read_json(dir.path / "out" / "rate.json");
  CHECK(r["fit"]["slope"].is_number());
  CHECK(r["pass"].is_boolean());

  // Simple policy with no length: the rate command picks one per horizon.
  doc["policy"] = {{"kind", "simple"}};
  REQUIRE(run("rate", write_config(dir.path, doc), dir.path / "simple") == kSuccess);
  const auto srows = read_lines(dir.path / "simple" / "rate.csv");
  REQUIRE(srows.size() == 5);
  CHECK(srows[1].rfind("200,", 0) == 0);
  CHECK(run("run", write_config(dir.path, doc), dir.path / "simple_run") == kConfigError);
}

TEST_CASE("diagnose") {
  TempDir dir;
  json doc = kMinimal;
  doc["diagnose"] = {{"alpha", 2}};
  REQUIRE(run("diagnose", write_config(dir.path, doc), dir.path / "out") == kSuccess);
  const json d = read_json(dir.path / "out" / "diagnose.json");
  CHECK(std::abs(d["diagnostics"]["beta_hat"].get<double>() - 0.5) < 0.15);
  CHECK(std::abs(d["diagnostics"]["M_hat"].get<double>() - 10.0 / 12.0) < 0.1 * 10.0 / 12.0);

  doc["objective"] = {{"name", "constant"}, {"value", 1.0}};
  std::string err;
  CHECK(run("diagnose", write_config(dir.path, doc), dir.path / "out2", &err) == kRuntimeFailure);
  CHECK(err.find("insufficient data") != std::string::npos);
}

TEST_CASE("binary exit codes") {
  TempDir dir;
  const std::string bin = BINSPLIT_CLI_PATH;
  const auto good = write_config(dir.path, kMinimal);
  json bad = kMinimal;
  bad["bogus"] = 1;
  const auto badp = write_config(dir.path, bad, "bad.json");
  auto code = [&](const std::string& args) {
    const int s = std::system((bin + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(s);
  };
  CHECK(code("run --config " + good.string() + " --out " + (dir.path / "o").string()) == 0);
  CHECK(code("run --config " + badp.string() + " --out " + (dir.path / "o").string()) == 2);
  CHECK(code("run") == 2);
  CHECK(code("frobnicate --config " + good.string()) == 2);
  CHECK(code("run --config " + good.string() + " --out " + (dir.path / "o").string() +
             " --set objective.dim=2 --set objective.assumption={\\\"alpha\\\":2,\\\"beta\\\":3,\\\"M\\\":1}") == 3);
}
