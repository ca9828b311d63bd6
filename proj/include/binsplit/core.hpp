#pragma once

// Decision-space geometry: the grid of initial cells, dyadic splitting,
// sampling inside a cell and point-to-child location.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "binsplit/random.hpp"

namespace binsplit {

using Point = std::vector<double>;

// Axis-aligned box S = [lower, upper] together with the margin A by which
// queries may leave S on every side.
class DecisionSpace {
 public:
  DecisionSpace(std::vector<double> lower, std::vector<double> upper, double margin = 0.0);

  // The cube [lo, hi]^dim.
  static DecisionSpace cube(std::size_t dim, double lo, double hi, double margin = 0.0);

  std::size_t dim() const noexcept { return lower_.size(); }
  const std::vector<double>& lower() const noexcept { return lower_; }
  const std::vector<double>& upper() const noexcept { return upper_; }
  double margin() const noexcept { return margin_; }
  double side(std::size_t i) const { return upper_[i] - lower_[i]; }
  double max_side() const;

  bool contains(std::span<const double> p) const;
  // Membership in S inflated by the margin.
  bool contains_inflated(std::span<const double> p) const;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
  double margin_;
};

// Hypercube cell [corner, corner + length]^d and the statistics of the
// queries attributed to it.
struct Bin {
  std::vector<double> corner;
  double length = 0.0;
  int depth = 0;
  std::int64_t count = 0;
  double loss_sum = 0.0;
  std::vector<std::int64_t> query_ids;

  std::size_t dim() const noexcept { return corner.size(); }
  double mean() const noexcept { return loss_sum / static_cast<double>(count); }
  double volume() const;

  // Attribute the observation y made at time t to this bin.
  void record(std::int64_t t, double y);
};

// Covers the space with prod_i ceil(side_i / a) cells of side a anchored at
// `lower`. Throws ConfigError naming the dimension whose overhang exceeds
// the margin. Cells are ordered with dimension 0 varying fastest.
std::vector<Bin> make_grid(const DecisionSpace& space, double a);

// Number of cells along each dimension for make_grid(space, a).
std::vector<std::size_t> grid_shape(const DecisionSpace& space, double a);

// 2^d children of half length. Child l has its upper half in dimension i
// iff bit i of l is set. Children are empty and one level deeper.
std::vector<Bin> split_bin(const Bin& parent);

Point sample_uniform(const Bin& bin, Rng& rng);

Point bin_center(const Bin& bin);

// Index of the child (in split_bin order) containing p. Cells are half-open
// except on the parent's maximal faces, which are closed. Throws
// ConsistencyError if p is outside the parent.
std::size_t locate_child(std::span<const Bin> children, std::span<const double> p);

// Half-open membership [corner, corner + length) per dimension. The upper
// face is closed where it coincides with region_upper, the maximal
// coordinates of the tiled region.
bool bin_contains(const Bin& bin, std::span<const double> p, std::span<const double> region_upper);

}  // namespace binsplit
