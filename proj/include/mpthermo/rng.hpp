#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace mpt {

/// Mixes a seed and a stream index into an independent 64-bit seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Portable seeded generator: mt19937_64 for bits, hand-rolled conversions so
/// that draws are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);
  /// Standard exponential variate.
  double exponential();
  /// Uniform point of the probability simplex with `size` coordinates.
  std::vector<double> simplex_point(std::size_t size);

 private:
  std::mt19937_64 engine_;
};

}  // namespace mpt
