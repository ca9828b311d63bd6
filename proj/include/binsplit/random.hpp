#pragma once

#include <cstdint>
#include <random>

namespace binsplit {

// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed of the `index`-th child stream of `parent`. Pure function of its
// inputs, so any single stream can be regenerated in isolation.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
  return splitmix64(parent ^ splitmix64(index + 1));
}

// Seeded random stream. Copying an Rng copies its full state, including the
// cached normal deviate, so copies produce identical sequences.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1). Some library versions can round up to 1.0; redraw.
  double uniform() {
    double u = unit_(engine_);
    while (u >= 1.0) u = unit_(engine_);
    return u;
  }

  double normal() { return normal_(engine_); }

  // Uniform on {0, ..., n-1}; n must be positive.
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace binsplit
