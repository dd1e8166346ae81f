#pragma once

#include <cstdint>
#include <limits>

namespace medoidjl {

/// SplitMix64 stream (Steele, Lea, Flood 2014). Version 1 of the random
/// stream contract: state advances by the golden-ratio increment, outputs are
/// the finalizer of the state. The sequence for a seed is fixed forever; test
/// vectors in tests/unit/test_rng.cpp pin it.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Uniform and normal variates on top of SplitMix64.
///
/// uniform01(): top 53 bits, mapped to (0, 1].
/// normal(): Box-Muller on consecutive uniform pairs (u1, u2); the pair
/// yields r cos(2 pi u2) then r sin(2 pi u2) with r = sqrt(-2 ln u1).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : bits_(seed) {}

  std::uint64_t next_u64() noexcept { return bits_(); }
  double uniform01() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * (uniform01() - 0x1p-53); }
  /// Uniform integer in [0, n), n >= 1 (Lemire's multiply-shift with rejection).
  std::uint64_t below(std::uint64_t n) noexcept;
  double normal() noexcept;

 private:
  SplitMix64 bits_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace medoidjl
