#include "binsplit/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "binsplit/errors.hpp"

namespace binsplit {

namespace {

// Relative slack when testing whether a divides a side length, so that
// 2 / 0.1 style round-off does not add a spurious extra cell.
constexpr double kDivisionSlack = 1e-9;

}  // namespace

DecisionSpace::DecisionSpace(std::vector<double> lower, std::vector<double> upper, double margin)
    : lower_(std::move(lower)), upper_(std::move(upper)), margin_(margin) {
  if (lower_.empty()) throw ConfigError("space", "dimension must be positive");
  if (lower_.size() != upper_.size())
    throw ConfigError("space", "lower and upper have different dimensions");
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (!(lower_[i] < upper_[i]))
      throw ConfigError("space.lower[" + std::to_string(i) + "]", "must be below upper bound");
  }
  if (!(margin_ >= 0.0) || !std::isfinite(margin_))
    throw ConfigError("space.margin", "must be a finite nonnegative number");
}

DecisionSpace DecisionSpace::cube(std::size_t dim, double lo, double hi, double margin) {
  return DecisionSpace(std::vector<double>(dim, lo), std::vector<double>(dim, hi), margin);
}

double DecisionSpace::max_side() const {
  double s = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) s = std::max(s, side(i));
  return s;
}

bool DecisionSpace::contains(std::span<const double> p) const {
  if (p.size() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i)
    if (p[i] < lower_[i] || p[i] > upper_[i]) return false;
  return true;
}

bool DecisionSpace::contains_inflated(std::span<const double> p) const {
  if (p.size() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i)
    if (p[i] < lower_[i] - margin_ || p[i] > upper_[i] + margin_) return false;
  return true;
}

double Bin::volume() const { return std::pow(length, static_cast<double>(dim())); }

void Bin::record(std::int64_t t, double y) {
  query_ids.push_back(t);
  ++count;
  loss_sum += y;
}

std::vector<std::size_t> grid_shape(const DecisionSpace& space, double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("bin length", "must be positive and finite");
  std::vector<std::size_t> shape(space.dim());
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const double ratio = space.side(i) / a;
    const double cells = std::max(1.0, std::ceil(ratio - kDivisionSlack * ratio));
    const double overhang = cells * a - space.side(i);
    if (overhang > space.margin() * (1.0 + kDivisionSlack) + kDivisionSlack * a) {
      throw ConfigError("dimension " + std::to_string(i),
                        "grid of length " + std::to_string(a) + " overhangs S by " +
                            std::to_string(overhang) + ", beyond margin " +
                            std::to_string(space.margin()));
    }
    shape[i] = static_cast<std::size_t>(cells);
  }
  return shape;
}

std::vector<Bin> make_grid(const DecisionSpace& space, double a) {
  const auto shape = grid_shape(space, a);
  std::size_t total = 1;
  for (auto n : shape) total *= n;

  std::vector<Bin> bins;
  bins.reserve(total);
  std::vector<std::size_t> idx(space.dim(), 0);
  for (std::size_t b = 0; b < total; ++b) {
    Bin bin;
    bin.length = a;
    bin.corner.resize(space.dim());
    for (std::size_t i = 0; i < space.dim(); ++i)
      bin.corner[i] = space.lower()[i] + static_cast<double>(idx[i]) * a;
    bins.push_back(std::move(bin));
    for (std::size_t i = 0; i < space.dim(); ++i) {
      if (++idx[i] < shape[i]) break;
      idx[i] = 0;
    }
  }
  return bins;
}

std::vector<Bin> split_bin(const Bin& parent) {
  const std::size_t d = parent.dim();
  const std::size_t n = std::size_t{1} << d;
  const double half = parent.length / 2.0;
  std::vector<Bin> children(n);
  for (std::size_t l = 0; l < n; ++l) {
    Bin& child = children[l];
    child.length = half;
    child.depth = parent.depth + 1;
    child.corner = parent.corner;
    for (std::size_t i = 0; i < d; ++i)
      if (l & (std::size_t{1} << i)) child.corner[i] += half;
  }
  return children;
}

Point sample_uniform(const Bin& bin, Rng& rng) {
  Point p(bin.dim());
  for (std::size_t i = 0; i < bin.dim(); ++i) p[i] = bin.corner[i] + bin.length * rng.uniform();
  return p;
}

Point bin_center(const Bin& bin) {
  Point p(bin.dim());
  for (std::size_t i = 0; i < bin.dim(); ++i) p[i] = bin.corner[i] + bin.length / 2.0;
  return p;
}

std::size_t locate_child(std::span<const Bin> children, std::span<const double> p) {
  const std::size_t d = p.size();
  if (children.size() != (std::size_t{1} << d) || children.front().dim() != d)
    throw ConsistencyError("locate_child: children do not match point dimension");

  const Bin& low = children.front();
  const Bin& high = children.back();
  std::size_t index = 0;
  for (std::size_t i = 0; i < d; ++i) {
    if (p[i] < low.corner[i] || p[i] > high.corner[i] + high.length)
      throw ConsistencyError("locate_child: point outside parent in dimension " + std::to_string(i));
    // The upper child's corner is the split coordinate, computed once in split_bin.
    if (p[i] >= children[std::size_t{1} << i].corner[i]) index |= std::size_t{1} << i;
  }
  return index;
}

bool bin_contains(const Bin& bin, std::span<const double> p, std::span<const double> region_upper) {
  for (std::size_t i = 0; i < bin.dim(); ++i) {
    const double hi = bin.corner[i] + bin.length;
    if (p[i] < bin.corner[i]) return false;
    if (p[i] > hi || (p[i] == hi && hi != region_upper[i])) return false;
  }
  return true;
}

}  // namespace binsplit
