#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "medoidjl/geometry.hpp"
#include "medoidjl/projection.hpp"

namespace medoidjl {

enum class TailMethod { kMonteCarlo, kClosedForm };
const char* to_string(TailMethod m);

struct TailEstimate {
  double probability = 0.0;
  double stderr_ = 0.0;
  TailMethod method = TailMethod::kMonteCarlo;
};

/// Monte Carlo estimate of Pr(X_t < t / (1 + eps)) for X_t chi-square with t
/// degrees of freedom. t > 2, eps in (0, 1/2), trials >= 100.
TailEstimate chi_square_lower_tail(std::size_t t, double eps, std::size_t trials,
                                   std::uint64_t seed);

/// 1 - e^{-x/2} sum_{j < t/2} (x/2)^j / j! for even t >= 2, x >= 0.
double chi_square_cdf_even(std::size_t t, double x);

struct DistortionStats {
  std::size_t pairs = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  /// Histogram of |Gp - Gq| / |p - q| over [lo, hi) in equal bins.
  double lo = 0.0;
  double hi = 2.0;
  std::vector<std::size_t> bins;
  std::size_t below = 0;  // ratios < lo
  std::size_t above = 0;  // ratios >= hi
};

/// Ratio distribution over all pairs of distinct points of P.
DistortionStats norm_distortion_stats(const WeightedPointSet& P, const GaussianMap& map,
                                      std::size_t bins = 40, double lo = 0.0, double hi = 2.0);

struct MeanEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

/// Monte Carlo estimate of E[max{0, |Gp - Gq|^z / |p - q|^z - (1 + eps)^z}]
/// over fresh t x d maps seeded seed, seed + 1, ... Only the direction of
/// p - q matters, so each trial draws t normals for |G u| with |u| = 1.
MeanEstimate expected_excess_distortion(Coords p, Coords q, double z, std::size_t t, double eps,
                                        std::size_t trials, std::uint64_t seed);

}  // namespace medoidjl
