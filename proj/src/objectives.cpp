#include "binsplit/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "binsplit/errors.hpp"
#include "binsplit/stats.hpp"

namespace binsplit {

std::string to_string(Norm norm) { return norm == Norm::l2 ? "l2" : "sup"; }

Norm norm_from_string(const std::string& name) {
  if (name == "l2") return Norm::l2;
  if (name == "sup") return Norm::sup;
  throw ConfigError("objective.norm", "unknown norm '" + name + "' (expected l2 or sup)");
}

Objective::Objective(std::string name, std::size_t dim, Function f, double optimum_value,
                     std::optional<AssumptionParams> assumption)
    : name_(std::move(name)),
      dim_(dim),
      f_(std::move(f)),
      optimum_(optimum_value),
      assumption_(assumption) {}

double Objective::operator()(std::span<const double> x) const {
  if (x.size() != dim_)
    throw ConfigError("objective", "point of dimension " + std::to_string(x.size()) +
                                       " passed to " + std::to_string(dim_) + "-d objective");
  return f_(x);
}

double Objective::gap(std::span<const double> x) const { return std::max(0.0, (*this)(x) - optimum_); }

double eval_f1(std::span<const double> x, std::span<const double> c) {
  if (x.size() != c.size()) throw ConfigError("objective.offset", "dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] + c[i]) * (x[i] + c[i]);
  return 10.0 * s;
}

namespace {

double distance(std::span<const double> x, std::span<const double> c, double sign, Norm norm) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = std::abs(x[i] + sign * c[i]);
    acc = norm == Norm::l2 ? acc + diff * diff : std::max(acc, diff);
  }
  return norm == Norm::l2 ? std::sqrt(acc) : acc;
}

// Iterates a tensor grid of `per_dim` points per dimension including the
// box endpoints.
template <typename Visit>
void for_each_grid_point(const DecisionSpace& space, std::size_t per_dim, Visit&& visit) {
  const std::size_t d = space.dim();
  std::vector<std::size_t> idx(d, 0);
  Point p(d);
  while (true) {
    for (std::size_t i = 0; i < d; ++i)
      p[i] = space.lower()[i] + space.side(i) * static_cast<double>(idx[i]) / static_cast<double>(per_dim - 1);
    visit(p);
    std::size_t i = 0;
    for (; i < d; ++i) {
      if (++idx[i] < per_dim) break;
      idx[i] = 0;
    }
    if (i == d) return;
  }
}

}  // namespace

double eval_f2(std::span<const double> x, std::span<const double> c, Norm norm) {
  if (x.size() != c.size()) throw ConfigError("objective.offset", "dimension mismatch");
  return 10.0 * std::min(distance(x, c, -1.0, norm), distance(x, c, 1.0, norm));
}

double max_gap_on_box(const Objective& obj, const DecisionSpace& space) {
  const double budget = 2.0e5;
  const auto per_dim = static_cast<std::size_t>(
      std::max(3.0, std::floor(std::pow(budget, 1.0 / static_cast<double>(space.dim())))));
  double worst = 0.0;
  for_each_grid_point(space, per_dim, [&](const Point& p) { worst = std::max(worst, obj.gap(p)); });
  return worst;
}

Objective make_objective(const ObjectiveSpec& spec, const DecisionSpace& space) {
  const std::size_t d = spec.dim;
  if (d == 0) throw ConfigError("objective.dim", "must be positive");
  if (d != space.dim())
    throw ConfigError("objective.dim", "does not match the dimension of space (" +
                                           std::to_string(space.dim()) + ")");
  std::vector<double> c = spec.offset.empty() ? std::vector<double>(d, 0.5) : spec.offset;
  if (c.size() != d) throw ConfigError("objective.offset", "must have " + std::to_string(d) + " entries");

  if (spec.name == "f1") {
    Objective draft("f1", d, [c](std::span<const double> x) { return eval_f1(x, c); }, 0.0);
    AssumptionParams params;
    params.alpha = 2.0;
    params.beta = static_cast<double>(d) / 2.0;
    // Cube-average excess of a quadratic is exactly 10 d a^2 / 12.
    params.M = std::max(max_gap_on_box(draft, space), 10.0 * static_cast<double>(d) / 12.0);
    params.A = space.margin();
    return Objective("f1", d, [c](std::span<const double> x) { return eval_f1(x, c); }, 0.0,
                     spec.assumption.value_or(params));
  }
  if (spec.name == "f2") {
    const Norm norm = spec.norm;
    auto f = [c, norm](std::span<const double> x) { return eval_f2(x, c, norm); };
    Objective draft("f2", d, f, 0.0);
    AssumptionParams params;
    params.alpha = 1.0;
    params.beta = static_cast<double>(d);
    // Lipschitz constant 10 times the mean offset norm inside a unit cube.
    const double lipschitz_term =
        norm == Norm::l2 ? 10.0 * std::sqrt(static_cast<double>(d) / 12.0) : 5.0;
    params.M = std::max(max_gap_on_box(draft, space), lipschitz_term);
    params.A = space.margin();
    return Objective("f2", d, f, 0.0, spec.assumption.value_or(params));
  }
  if (spec.name == "constant") {
    const double v = spec.value;
    return Objective("constant", d, [v](std::span<const double>) { return v; }, v, spec.assumption);
  }
  if (spec.name == "step") {
    const double threshold = spec.threshold;
    const double gap = spec.gap;
    if (!(gap > 0.0)) throw ConfigError("objective.gap", "must be positive");
    return Objective(
        "step", d, [threshold, gap](std::span<const double> x) { return x[0] < threshold ? 0.0 : gap; },
        0.0, spec.assumption);
  }
  throw ConfigError("objective.name", "unknown objective '" + spec.name + "' (expected f1, f2, constant or step)");
}

double noisy_observe(const Objective& obj, const DecisionSpace& space, std::span<const double> x,
                     const NoiseModel& noise, Rng& rng) {
  if (!space.contains_inflated(x)) throw DomainError("query outside the decision space and its margin");
  const double z = rng.normal();
  return obj(x) + noise.scale * z;
}

BetaCheck check_beta_bound(double alpha, double beta, std::size_t d) {
  const double bound = static_cast<double>(d) / alpha;
  return {beta <= bound + 1e-12, bound};
}

void require_beta_bound(double alpha, double beta, std::size_t d) {
  const BetaCheck check = check_beta_bound(alpha, beta, d);
  if (!check.ok) {
    throw GuardViolation("beta exceeds d/alpha: beta=" + std::to_string(beta) + " > " +
                         std::to_string(check.bound) + " (d=" + std::to_string(d) +
                         ", alpha=" + std::to_string(alpha) + "); no such function exists");
  }
}

double estimate_smoothness(const Objective& obj, double alpha, const DecisionSpace& space, Rng& rng,
                           const SmoothnessOptions& options) {
  if (options.samples < 100) throw ConfigError("diagnose.samples", "must be at least 100");
  if (options.ladder_levels == 0) throw ConfigError("diagnose.ladder_levels", "must be positive");
  const double top = options.max_length.value_or(space.margin());
  if (!(top > 0.0))
    throw ConfigError("space.margin", "smoothness ladder needs a positive margin or diagnose.max_length");

  const std::size_t d = space.dim();
  double running_max = 0.0;
  Point plus(d);
  Point minus(d);

  for (std::size_t s = 0; s < options.samples; ++s) {
    Point x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = space.lower()[i] + space.side(i) * rng.uniform();
    const double fx = obj(x);

    for (std::size_t r = 0; r < options.ladder_levels; ++r) {
      const double a = top * std::exp2(-static_cast<double>(r));
      const double scale = std::pow(a, alpha);

      // Welford over antithetic pair averages (f(x+u) + f(x-u)) / 2.
      std::size_t n = 0;
      double m = 0.0;
      double m2 = 0.0;
      std::size_t target = 256;
      while (true) {
        while (n < target) {
          for (std::size_t i = 0; i < d; ++i) {
            const double u = a * (rng.uniform() - 0.5);
            plus[i] = x[i] + u;
            minus[i] = x[i] - u;
          }
          const double v = 0.5 * (obj(plus) + obj(minus));
          ++n;
          const double delta = v - m;
          m += delta / static_cast<double>(n);
          m2 += delta * (v - m);
        }
        const double se = std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) / scale;
        const double ratio = std::abs(m - fx) / scale;
        const double reference = std::max(running_max, ratio);
        if (se <= options.relative_se * reference || se < 1e-12 || n >= options.max_pairs) {
          running_max = std::max(running_max, ratio);
          break;
        }
        target = std::min(options.max_pairs, 2 * target);
      }
    }
  }
  return running_max;
}

double estimate_beta(const Objective& obj, const DecisionSpace& space, double grid_a,
                     std::span<const double> eps_ladder) {
  if (!(grid_a > 0.0)) throw ConfigError("diagnose.grid_a", "must be positive");
  for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
    if (!(eps_ladder[i] > 0.0)) throw ConfigError("diagnose.eps_ladder", "entries must be positive");
    if (i > 0 && !(eps_ladder[i] < eps_ladder[i - 1]))
      throw ConfigError("diagnose.eps_ladder", "must be strictly decreasing");
  }

  const std::size_t d = space.dim();
  std::vector<std::size_t> shape(d);
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) {
    shape[i] = static_cast<std::size_t>(std::ceil(space.side(i) / grid_a - 1e-9));
    total *= shape[i];
  }

  // Gaps at all cell centers, sorted so each count is a binary search.
  std::vector<double> gaps;
  gaps.reserve(total);
  std::vector<std::size_t> idx(d, 0);
  Point p(d);
  for (std::size_t b = 0; b < total; ++b) {
    for (std::size_t i = 0; i < d; ++i)
      p[i] = space.lower()[i] + (static_cast<double>(idx[i]) + 0.5) * grid_a;
    gaps.push_back(obj(p) - obj.optimum_value());
    for (std::size_t i = 0; i < d; ++i) {
      if (++idx[i] < shape[i]) break;
      idx[i] = 0;
    }
  }
  std::sort(gaps.begin(), gaps.end());

  const double cell_volume = std::pow(grid_a, static_cast<double>(d));
  std::vector<double> log_eps;
  std::vector<double> log_vol;
  std::set<std::size_t> distinct;
  for (double eps : eps_ladder) {
    const auto count = static_cast<std::size_t>(std::lower_bound(gaps.begin(), gaps.end(), eps) - gaps.begin());
    if (count == 0) continue;
    distinct.insert(count);
    log_eps.push_back(std::log(eps));
    log_vol.push_back(std::log(static_cast<double>(count) * cell_volume));
  }
  if (distinct.size() < 3) {
    throw InsufficientData("sublevel-set counts do not vary over the epsilon ladder (" +
                           std::to_string(distinct.size()) +
                           " distinct nonzero counts, need 3); cannot fit beta");
  }
  return fit_line(log_eps, log_vol).slope;
}

}  // namespace binsplit
