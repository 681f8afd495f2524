#pragma once

#include <cstdint>

namespace sagsim {

// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Combines two 64-bit values into a derived seed. Used for per-timestep
/// seeds of the random scheme: mix(scheme_seed, step_index).
constexpr std::uint64_t mix_seeds(std::uint64_t a, std::uint64_t b) noexcept {
  return splitmix64(a ^ splitmix64(b + 0x9E3779B97F4A7C15ULL));
}

/// SplitMix64 stream. Every draw is defined here rather than through
/// <random> distributions so that outputs are identical across standard
/// library implementations.
class Rng {
 public:
  explicit constexpr Rng(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1].
  double uniform_open_closed() noexcept {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t limit = -n % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t x = next();
      if (x >= limit) return x % n;
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace sagsim
