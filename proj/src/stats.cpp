#include "medoidjl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "medoidjl/rng.hpp"

namespace medoidjl {

const char* to_string(TailMethod m) {
  return m == TailMethod::kMonteCarlo ? "monte-carlo" : "closed-form";
}

TailEstimate chi_square_lower_tail(std::size_t t, double eps, std::size_t trials,
                                   std::uint64_t seed) {
  require(t > 2, ErrorCode::kInvalidArgument, "t must exceed 2");
  require(eps > 0.0 && eps < 0.5, ErrorCode::kInvalidArgument, "eps must lie in (0, 1/2)");
  require(trials >= 100, ErrorCode::kInvalidArgument, "at least 100 trials are required");
  const double threshold = static_cast<double>(t) / (1.0 + eps);
  Rng rng(seed);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    double x = 0.0;
    for (std::size_t j = 0; j < t; ++j) {
      const double g = rng.normal();
      x += g * g;
    }
    if (x < threshold) ++hits;
  }
  TailEstimate e;
  const double n = static_cast<double>(trials);
  e.probability = static_cast<double>(hits) / n;
  e.stderr_ = std::sqrt(e.probability * (1.0 - e.probability) / n);
  e.method = TailMethod::kMonteCarlo;
  return e;
}

double chi_square_cdf_even(std::size_t t, double x) {
  require(t >= 2 && t % 2 == 0, ErrorCode::kInvalidArgument, "t must be even and >= 2");
  require(x >= 0.0, ErrorCode::kInvalidArgument, "x must be >= 0");
  if (std::isinf(x)) return 1.0;
  const double h = x / 2.0;
  // Sum in log space for the leading factor so large x does not underflow early.
  double term = 1.0, sum = 1.0;
  for (std::size_t j = 1; j < t / 2; ++j) {
    term *= h / static_cast<double>(j);
    sum += term;
  }
  const double tail = std::exp(-h + std::log(sum));
  return std::clamp(1.0 - tail, 0.0, 1.0);
}

DistortionStats norm_distortion_stats(const WeightedPointSet& P, const GaussianMap& map,
                                      std::size_t bins, double lo, double hi) {
  require(P.size() >= 2, ErrorCode::kEmptyInput, "need at least two distinct points");
  require(bins >= 1 && hi > lo, ErrorCode::kInvalidArgument, "bad histogram range");
  const std::size_t t = map.target_dim();
  std::vector<double> img(P.size() * t);
  for (std::size_t i = 0; i < P.size(); ++i) {
    map.apply_into(P.point(i), std::span<double>(img.data() + i * t, t));
  }
  DistortionStats s;
  s.lo = lo;
  s.hi = hi;
  s.bins.assign(bins, 0);
  s.min = std::numeric_limits<double>::infinity();
  s.max = -std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (std::size_t a = 0; a < P.size(); ++a) {
    for (std::size_t b = a + 1; b < P.size(); ++b) {
      const double ratio = dist(Coords(img.data() + a * t, t), Coords(img.data() + b * t, t)) /
                           dist(P.point(a), P.point(b));
      ++s.pairs;
      total += ratio;
      s.min = std::min(s.min, ratio);
      s.max = std::max(s.max, ratio);
      if (ratio < lo) {
        ++s.below;
      } else if (ratio >= hi) {
        ++s.above;
      } else {
        auto bin = static_cast<std::size_t>((ratio - lo) / (hi - lo) * static_cast<double>(bins));
        ++s.bins[std::min(bin, bins - 1)];
      }
    }
  }
  s.mean = total / static_cast<double>(s.pairs);
  return s;
}

MeanEstimate expected_excess_distortion(Coords p, Coords q, double z, std::size_t t, double eps,
                                        std::size_t trials, std::uint64_t seed) {
  require(p.size() == q.size(), ErrorCode::kDimensionMismatch, "p and q differ in dimension");
  require(dist(p, q) > 0.0, ErrorCode::kInvalidArgument, "p and q must differ");
  require(z >= 1.0 && t >= 1 && eps > 0.0 && trials >= 2, ErrorCode::kInvalidArgument,
          "need z >= 1, t >= 1, eps > 0 and trials >= 2");
  // G(p - q)/|p - q| is N(0, I_t / t) for any p != q.
  const double cap = std::pow(1.0 + eps, z);
  Rng rng(seed);
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    double sq = 0.0;
    for (std::size_t j = 0; j < t; ++j) {
      const double g = rng.normal();
      sq += g * g;
    }
    const double ratio = std::pow(sq / static_cast<double>(t), z / 2.0);
    const double excess = std::max(0.0, ratio - cap);
    sum += excess;
    sum2 += excess * excess;
  }
  const double n = static_cast<double>(trials);
  MeanEstimate m;
  m.mean = sum / n;
  m.stderr_ = std::sqrt(std::max(0.0, sum2 / n - m.mean * m.mean) / (n - 1.0));
  return m;
}

}  // namespace medoidjl
