#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace mg {

/// Seeded random stream. The pair (seed, stream) fully determines the draw
/// sequence; draws are built from raw 64-bit engine output so the sequence
/// does not depend on the standard library's distribution implementations.
class RandomSource {
 public:
  RandomSource(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  /// Index drawn proportionally to the (nonnegative) weights.
  std::size_t categorical(std::span<const double> weights);

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace mg
