#pragma once

// Portable, seedable randomness. The standard <random> distributions are
// implementation-defined, so Gaussians are drawn here by Box–Muller on top of
// xoshiro256** to keep instances reproducible across toolchains.

#include <array>
#include <cstdint>
#include <limits>

namespace ncstat {

/// SplitMix64 step: advances *state and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state);

/// xoshiro256** (Blackman & Vigna). Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  /// The four state words are successive SplitMix64 outputs starting from seed.
  explicit Rng(std::uint64_t seed);

  /// Independent stream for trial `index` of a run seeded with `seed`:
  /// Rng(seed ^ m) with m the SplitMix64 output for state index·φ64 (φ64 = 0x9E3779B97F4A7C15).
  static Rng stream(std::uint64_t seed, std::uint64_t index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Uniform in [0, 1) from the top 53 bits.
  double uniform();
  /// Uniform integer in [lo, hi] (inclusive); modulo bias is negligible for small ranges.
  int uniform_int(int lo, int hi);
  /// Standard normal via Box–Muller; both outputs of a pair are used.
  double normal();

 private:
  std::array<std::uint64_t, 4> s_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ncstat
