#include "binsplit/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "binsplit/errors.hpp"

namespace binsplit::cli {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double as_double(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  return v.get<double>();
}

std::int64_t as_int(const json& v, const std::string& path) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 9.0e15) return static_cast<std::int64_t>(d);
  }
  throw ConfigError(path, "expected an integer");
}

// Object reader that remembers which keys were consumed so leftovers can be
// reported as unknown fields.
class Section {
 public:
  Section(const json* node, std::string path) : node_(node), path_(std::move(path)) {
    if (node_ && !node_->is_null() && !node_->is_object()) throw ConfigError(path_, "expected an object");
  }

  bool has(const std::string& key) const { return find(key) != nullptr; }

  const json* find(const std::string& key) const {
    if (!node_ || node_->is_null()) return nullptr;
    auto it = node_->find(key);
    if (it == node_->end() || it->is_null()) return nullptr;
    return &*it;
  }

  const json* take(const std::string& key) {
    used_.insert(key);
    return find(key);
  }

  std::string path(const std::string& key) const { return join(path_, key); }

  std::optional<double> number(const std::string& key) {
    const json* v = take(key);
    if (!v) return std::nullopt;
    return as_double(*v, path(key));
  }

  double number(const std::string& key, double fallback) { return number(key).value_or(fallback); }

  std::optional<std::int64_t> integer(const std::string& key) {
    const json* v = take(key);
    if (!v) return std::nullopt;
    return as_int(*v, path(key));
  }

  std::optional<std::string> string(const std::string& key) {
    const json* v = take(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) throw ConfigError(path(key), "expected a string");
    return v->get<std::string>();
  }

  std::optional<std::uint64_t> unsigned_integer(const std::string& key) {
    const json* v = take(key);
    if (!v) return std::nullopt;
    if (v->is_number_unsigned()) return v->get<std::uint64_t>();
    const std::int64_t i = as_int(*v, path(key));
    if (i < 0) throw ConfigError(path(key), "must be nonnegative");
    return static_cast<std::uint64_t>(i);
  }

  std::optional<std::vector<double>> numbers(const std::string& key) {
    const json* v = take(key);
    if (!v) return std::nullopt;
    if (!v->is_array()) throw ConfigError(path(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v->size(); ++i)
      out.push_back(as_double((*v)[i], path(key) + "[" + std::to_string(i) + "]"));
    return out;
  }

  // A scalar broadcast to `dim` entries, or an array of exactly `dim` entries.
  std::optional<std::vector<double>> per_dim(const std::string& key, std::size_t dim) {
    const json* v = find(key);
    if (!v) {
      used_.insert(key);
      return std::nullopt;
    }
    if (v->is_number()) {
      used_.insert(key);
      return std::vector<double>(dim, as_double(*v, path(key)));
    }
    auto out = numbers(key);
    if (out->size() != dim)
      throw ConfigError(path(key), "expected " + std::to_string(dim) + " entries, got " +
                                       std::to_string(out->size()));
    return out;
  }

  Section child(const std::string& key) {
    used_.insert(key);
    return Section(find(key), path(key));
  }

  void finish() const {
    if (!node_ || node_->is_null()) return;
    for (auto it = node_->begin(); it != node_->end(); ++it)
      if (!used_.count(it.key())) throw ConfigError(path(it.key()), "unknown field");
  }

 private:
  const json* node_;
  std::string path_;
  std::set<std::string> used_;
};

std::optional<AssumptionParams> parse_assumption(Section s) {
  if (!s.has("alpha") && !s.has("beta") && !s.has("M")) {
    s.finish();
    return std::nullopt;
  }
  AssumptionParams p;
  const auto alpha = s.number("alpha");
  const auto beta = s.number("beta");
  const auto M = s.number("M");
  if (!alpha || !beta || !M) throw ConfigError(s.path("alpha"), "assumption needs alpha, beta and M together");
  p.alpha = *alpha;
  p.beta = *beta;
  p.M = *M;
  p.C0 = s.number("C0", 1.0);
  p.A = s.number("A", 0.0);
  if (!(p.alpha > 0.0 && p.alpha <= 2.0)) throw ConfigError(s.path("alpha"), "must lie in (0, 2]");
  if (!(p.beta >= 0.0)) throw ConfigError(s.path("beta"), "must be nonnegative");
  if (!(p.M > 0.0)) throw ConfigError(s.path("M"), "must be positive");
  s.finish();
  return p;
}

json assumption_json(const AssumptionParams& p) {
  return {{"alpha", p.alpha}, {"beta", p.beta}, {"M", p.M}, {"C0", p.C0}, {"A", p.A}};
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

TraceDetail trace_detail_from_string(const std::string& name) {
  if (name == "none") return TraceDetail::none;
  if (name == "cumulative") return TraceDetail::cumulative;
  if (name == "full") return TraceDetail::full;
  throw ConfigError("trace", "unknown trace detail '" + name + "' (expected none, cumulative or full)");
}

std::string to_string(TraceDetail detail) {
  switch (detail) {
    case TraceDetail::none: return "none";
    case TraceDetail::cumulative: return "cumulative";
    case TraceDetail::full: return "full";
  }
  return "none";
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("--set", "expected dotted.path=value, got '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);

  json value = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = text;

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("--set", "empty path component in '" + path + "'");
    if (!node->is_object()) {
      if (!node->is_null()) throw ConfigError(path, "cannot descend into a non-object");
      *node = json::object();
    }
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  json doc = json::parse(in, nullptr, /*allow_exceptions=*/false, /*ignore_comments=*/true);
  if (doc.is_discarded()) throw ConfigError("--config", "'" + path + "' is not valid JSON");
  if (!doc.is_object()) throw ConfigError("--config", "top level must be an object");
  return doc;
}

Config parse_config(const json& doc) {
  Config cfg;
  ExperimentConfig& ex = cfg.experiment;
  Section root(&doc, "");

  if (auto v = root.integer("format_version"); v && *v != kFormatVersion)
    throw ConfigError("format_version", "unsupported version " + std::to_string(*v));

  // objective
  {
    Section s = root.child("objective");
    ObjectiveSpec& o = ex.objective;
    o.name = s.string("name").value_or("f1");
    const auto dim = s.integer("dim").value_or(1);
    if (dim < 1 || dim > 16) throw ConfigError(s.path("dim"), "must be between 1 and 16");
    o.dim = static_cast<std::size_t>(dim);
    o.offset = s.per_dim("offset", o.dim).value_or(std::vector<double>(o.dim, 0.5));
    o.norm = norm_from_string(s.string("norm").value_or("l2"));
    o.value = s.number("value", 0.0);
    o.threshold = s.number("threshold", 0.0);
    o.gap = s.number("gap", 1.0);
    o.assumption = parse_assumption(s.child("assumption"));
    s.finish();
  }

  // space
  {
    Section s = root.child("space");
    const std::size_t d = ex.objective.dim;
    auto lower = s.per_dim("lower", d).value_or(std::vector<double>(d, -1.0));
    auto upper = s.per_dim("upper", d).value_or(std::vector<double>(d, 1.0));
    const double margin = s.number("margin", 0.5);
    s.finish();
    ex.space = DecisionSpace(std::move(lower), std::move(upper), margin);
  }

  // policy
  {
    Section s = root.child("policy");
    PolicySpec& p = ex.policy;
    p.kind = policy_kind_from_string(s.string("kind").value_or("adaptive"));
    p.a = s.number("a", 0.0);
    p.a0 = s.number("a0");
    p.alpha = s.number("alpha", ex.objective.name == "f1" ? 2.0 : 1.0);
    p.mu = s.number("mu");
    p.assumption_M = s.number("M");
    s.finish();
    if (p.kind == PolicyKind::adaptive && !p.a0) p.a0 = ex.space.max_side();
  }

  {
    Section s = root.child("noise");
    ex.noise.scale = s.number("scale", 1.0);
    if (!(ex.noise.scale >= 0.0)) throw ConfigError(s.path("scale"), "must be nonnegative");
    s.finish();
  }

  ex.horizon = root.integer("horizon").value_or(10000);
  const auto reps = root.integer("replications").value_or(1);
  if (reps < 1) throw ConfigError("replications", "must be at least 1");
  ex.replications = static_cast<std::size_t>(reps);
  ex.seed = root.unsigned_integer("seed").value_or(1);
  const auto threads = root.integer("threads").value_or(1);
  if (threads < 0) throw ConfigError("threads", "must be nonnegative");
  ex.threads = static_cast<std::size_t>(threads);
  ex.detail = trace_detail_from_string(root.string("trace").value_or("none"));

  {
    Section s = root.child("sweep");
    cfg.sweep.lengths = s.numbers("lengths").value_or(std::vector<double>{});
    s.finish();
  }

  {
    Section s = root.child("rate");
    if (auto hs = s.numbers("horizons")) {
      for (std::size_t i = 0; i < hs->size(); ++i) {
        const double h = (*hs)[i];
        if (!(h >= 2.0) || std::floor(h) != h)
          throw ConfigError(s.path("horizons") + "[" + std::to_string(i) + "]", "must be an integer >= 2");
        cfg.rate.horizons.push_back(static_cast<std::int64_t>(h));
      }
    }
    if (const json* v = s.take("simple_length")) {
      if (v->is_string()) {
        if (v->get<std::string>() != "optimal")
          throw ConfigError(s.path("simple_length"), "expected a number or \"optimal\"");
      } else {
        cfg.rate.simple_length = as_double(*v, s.path("simple_length"));
      }
    }
    cfg.rate.log_power = s.number("log_power");
    if (auto band = s.numbers("band")) {
      if (band->size() != 2 || !((*band)[0] < (*band)[1]))
        throw ConfigError(s.path("band"), "expected [low, high] with low < high");
      cfg.rate.band_low = (*band)[0];
      cfg.rate.band_high = (*band)[1];
    }
    s.finish();
  }

  {
    Section s = root.child("diagnose");
    DiagnoseSettings& dg = cfg.diagnose;
    dg.alpha = s.number("alpha");
    if (auto v = s.integer("samples")) {
      if (*v < 100) throw ConfigError(s.path("samples"), "must be at least 100");
      dg.smoothness.samples = static_cast<std::size_t>(*v);
    }
    if (auto v = s.integer("ladder_levels")) {
      if (*v < 1 || *v > 40) throw ConfigError(s.path("ladder_levels"), "must be between 1 and 40");
      dg.smoothness.ladder_levels = static_cast<std::size_t>(*v);
    }
    dg.smoothness.max_length = s.number("max_length");
    if (auto v = s.number("relative_se")) {
      if (!(*v > 0.0 && *v < 0.05)) throw ConfigError(s.path("relative_se"), "must lie in (0, 0.05)");
      dg.smoothness.relative_se = *v;
    }
    dg.grid_a = s.number("grid_a");
    dg.eps_ladder = s.numbers("eps_ladder").value_or(std::vector<double>{});
    s.finish();
  }

  root.finish();
  // A simple policy may leave a unset when the rate command supplies it;
  // every command validates its own configuration again.
  ExperimentConfig probe = ex;
  if (probe.policy.kind == PolicyKind::simple && probe.policy.a == 0.0) probe.policy.a = 1.0;
  probe.validate();
  return cfg;
}

json echo_config(const Config& cfg) {
  const ExperimentConfig& ex = cfg.experiment;
  const ObjectiveSpec& o = ex.objective;
  json objective = {{"name", o.name}, {"dim", o.dim}, {"offset", o.offset},
                    {"norm", to_string(o.norm)}, {"value", o.value}, {"threshold", o.threshold},
                    {"gap", o.gap}};
  if (o.assumption) objective["assumption"] = assumption_json(*o.assumption);

  const PolicySpec& p = ex.policy;
  json policy = {{"kind", to_string(p.kind)}};
  if (p.kind == PolicyKind::simple) {
    policy["a"] = p.a;
  } else {
    policy["a0"] = p.a0.value_or(ex.space.max_side());
    policy["alpha"] = p.alpha;
    policy["mu"] = resolve_mu(p, ex.space.dim());
    policy["M"] = optional_json(p.assumption_M);
  }

  json rate = {{"horizons", cfg.rate.horizons},
               {"simple_length", cfg.rate.simple_length ? json(*cfg.rate.simple_length) : json("optimal")},
               {"log_power", optional_json(cfg.rate.log_power)}};
  if (cfg.rate.band_low) rate["band"] = {*cfg.rate.band_low, *cfg.rate.band_high};

  const DiagnoseSettings& dg = cfg.diagnose;
  json diagnose = {{"alpha", optional_json(dg.alpha)},
                   {"samples", dg.smoothness.samples},
                   {"ladder_levels", dg.smoothness.ladder_levels},
                   {"max_length", optional_json(dg.smoothness.max_length)},
                   {"relative_se", dg.smoothness.relative_se},
                   {"grid_a", optional_json(dg.grid_a)},
                   {"eps_ladder", dg.eps_ladder}};

  return {
      {"format_version", kFormatVersion},
      {"objective", objective},
      {"space", {{"lower", ex.space.lower()}, {"upper", ex.space.upper()}, {"margin", ex.space.margin()}}},
      {"policy", policy},
      {"noise", {{"scale", ex.noise.scale}}},
      {"horizon", ex.horizon},
      {"replications", ex.replications},
      {"seed", ex.seed},
      {"threads", ex.threads},
      {"trace", to_string(ex.detail)},
      {"sweep", {{"lengths", cfg.sweep.lengths}}},
      {"rate", rate},
      {"diagnose", diagnose},
  };
}

}  // namespace binsplit::cli
