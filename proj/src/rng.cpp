#include "medoidjl/rng.hpp"

#include <cmath>
#include <numbers>

namespace medoidjl {

double Rng::uniform01() noexcept {
  return static_cast<double>((bits_() >> 11) + 1) * 0x1p-53;
}

std::uint64_t Rng::below(std::uint64_t n) noexcept {
  // 128-bit multiply-shift; reject the biased low region.
  const std::uint64_t threshold = (0 - n) % n;
  while (true) {
    const unsigned __int128 m = static_cast<unsigned __int128>(bits_()) * n;
    if (static_cast<std::uint64_t>(m) >= threshold) {
      return static_cast<std::uint64_t>(m >> 64);
    }
  }
}

double Rng::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

}  // namespace medoidjl
