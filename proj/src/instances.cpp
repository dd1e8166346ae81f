#include "medoidjl/instances.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "medoidjl/rng.hpp"

namespace medoidjl {

namespace {

const PowerExponent kMedian{1.0};

ClusteringInstance discrete_from(std::vector<Point> pts, std::vector<std::uint64_t> w,
                                 std::size_t k) {
  return ClusteringInstance::discrete(WeightedPointSet(pts, std::move(w)), k, kMedian);
}

}  // namespace

ClusteringInstance gen_basis(std::size_t n) {
  require(n >= 4 && n % 2 == 0, ErrorCode::kInvalidArgument, "basis needs an even n >= 4");
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(Point::basis(n, i));
  return discrete_from(std::move(pts), std::vector<std::uint64_t>(n, 1), 2);
}

std::size_t half_log2(std::uint64_t n) {
  require(n >= 1, ErrorCode::kInvalidArgument, "n must be >= 1");
  return static_cast<std::size_t>(std::bit_width(n) - 1) / 2;
}

namespace {

ClusteringInstance decay_family(std::uint64_t n, double base, std::size_t k) {
  require(n >= 16, ErrorCode::kInvalidArgument, "decay instances need n >= 16");
  const std::size_t m = half_log2(n);
  const std::size_t d = m + 1;
  std::vector<Point> pts;
  std::vector<std::uint64_t> w;
  for (std::size_t i = 0; i <= m; ++i) {
    pts.push_back(Point::basis(d, i, std::pow(base, static_cast<double>(i))));
    w.push_back(1);
  }
  pts.push_back(Point::zeros(d));
  w.push_back(n - m - 1);
  return discrete_from(std::move(pts), std::move(w), k);
}

}  // namespace

ClusteringInstance gen_decay(std::uint64_t n) { return decay_family(n, 0.5, 1); }

ClusteringInstance gen_eps_decay(std::uint64_t n, double eps) {
  require(eps > 0.0 && eps < 0.5, ErrorCode::kInvalidArgument, "eps must lie in (0, 1/2)");
  return decay_family(n, 1.0 - eps, 2);
}

ClusteringInstance gen_candidate(std::uint64_t n, std::size_t s) {
  require(n >= 1 && s >= 1, ErrorCode::kInvalidArgument, "candidate needs n, s >= 1");
  require(s <= 1000, ErrorCode::kUnsupported,
          "candidate coordinates 2^s overflow past s = 1000; use candidate_ratios");
  WeightedPointSet P(std::vector<Point>{Point::zeros(s)}, std::vector<std::uint64_t>{n});
  std::vector<Point> q;
  for (std::size_t i = 1; i <= s; ++i) {
    q.push_back(Point::basis(s, i - 1, std::ldexp(1.0, static_cast<int>(i))));
  }
  return ClusteringInstance(std::move(P), WeightedPointSet(q), 1, kMedian);
}

std::vector<double> candidate_ratios(const GaussianMap& map) {
  const std::size_t d = map.source_dim(), t = map.target_dim();
  std::vector<double> sq(d, 0.0);
  for (std::size_t r = 0; r < t; ++r) {
    auto row = map.row(r);
    for (std::size_t c = 0; c < d; ++c) sq[c] += row[c] * row[c];
  }
  for (auto& x : sq) x = std::sqrt(x);
  return sq;
}

ClusteringInstance gen_pairs(std::size_t k) {
  require(k >= 1, ErrorCode::kInvalidArgument, "pairs needs k >= 1");
  const std::size_t kk = k % 2 == 1 ? k : k + 1;
  const std::size_t m = (kk + 1) / 2;
  std::vector<Point> pts;
  for (std::size_t i = 1; i <= m; ++i) {
    std::vector<double> a(m, 0.0);
    a[0] = 10.0 * static_cast<double>(i);
    pts.emplace_back(a);
    a[i - 1] += 1.0;
    pts.emplace_back(a);
  }
  return discrete_from(std::move(pts), std::vector<std::uint64_t>(2 * m, 1), k);
}

ClusteringInstance gen_kernel_demo(std::uint64_t n, std::size_t d) {
  require(d >= 2, ErrorCode::kInvalidArgument, "kernel demo needs d >= 2");
  require(n >= 1, ErrorCode::kInvalidArgument, "kernel demo needs n >= 1");
  WeightedPointSet P(std::vector<Point>{Point::zeros(d)}, std::vector<std::uint64_t>{n});
  return ClusteringInstance::discrete(std::move(P), 1, kMedian);
}

Point kernel_vector(const GaussianMap& map) {
  const std::size_t t = map.target_dim(), d = map.source_dim();
  require(t < d, ErrorCode::kInvalidArgument, "the kernel may be trivial when t >= d");
  // Orthonormal basis of the row space (modified Gram-Schmidt, two passes).
  std::vector<std::vector<double>> basis;
  auto project_out = [&](std::vector<double>& v) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        double dot = 0.0;
        for (std::size_t j = 0; j < d; ++j) dot += v[j] * b[j];
        for (std::size_t j = 0; j < d; ++j) v[j] -= dot * b[j];
      }
    }
  };
  for (std::size_t r = 0; r < t; ++r) {
    auto row = map.row(r);
    std::vector<double> v(row.begin(), row.end());
    const double before = norm(v);
    project_out(v);
    const double len = norm(v);
    if (len <= 1e-12 * before) continue;  // dependent row
    for (auto& x : v) x /= len;
    basis.push_back(std::move(v));
  }
  std::vector<double> best;
  double best_len = -1.0;
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> v(d, 0.0);
    v[j] = 1.0;
    project_out(v);
    const double len = norm(v);
    if (len > best_len) {
      best_len = len;
      best = std::move(v);
    }
  }
  for (int i = 0; i < 8; ++i) {
    const double len = norm(best);
    if (len == 1.0) break;
    for (auto& x : best) x /= len;
  }
  // Rescaling can oscillate around 1 by an ulp. One ulp of the largest
  // coordinate moves the squared norm by less than the interval whose square
  // root rounds to 1, so stepping it lands there.
  std::size_t big = 0;
  for (std::size_t j = 1; j < d; ++j) {
    if (std::abs(best[j]) > std::abs(best[big])) big = j;
  }
  for (int i = 0; i < 64 && norm(best) != 1.0; ++i) {
    const double toward = norm(best) > 1.0 ? 0.0 : std::copysign(2.0, best[big]);
    best[big] = std::nextafter(best[big], toward);
  }
  return Point(std::move(best));
}

ClusteringInstance gen_doubling(std::size_t n, std::size_t ddim_target, double spread,
                                std::uint64_t seed) {
  require(ddim_target >= 1 && ddim_target <= 6, ErrorCode::kInvalidArgument,
          "ddim_target must lie in [1, 6]");
  require(n >= 1, ErrorCode::kInvalidArgument, "n must be >= 1");
  require(spread > 0.0 && std::isfinite(spread), ErrorCode::kInvalidArgument,
          "spread must be positive");
  const std::size_t D = ddim_target;
  const std::size_t out_dim = 4 * D;

  // Points of Z^D whose coordinates use only base-4 digits {0, 1}, taken in
  // Morton order. A uniform grid patch already needs 9 half-radius balls for
  // the 3x3 block around a point; the 4-adic spacing keeps every ball made of
  // at most 2^D well-separated sub-blocks, so the greedy cover stays near 2^D.
  std::vector<std::vector<long>> lattice;
  lattice.reserve(n);
  for (std::size_t m = 0; m < n; ++m) {
    std::vector<long> lp(D, 0);
    std::size_t bits = m;
    for (long scale = 1; bits != 0; scale *= 4) {
      for (std::size_t a = 0; a < D; ++a, bits >>= 1) {
        if (bits & 1U) lp[a] += scale;
      }
    }
    lattice.push_back(std::move(lp));
  }

  Rng rng(seed);
  // Random isometry R^D -> R^{4D}: orthonormalized Gaussian columns.
  std::vector<std::vector<double>> cols;
  while (cols.size() < D) {
    std::vector<double> v(out_dim);
    for (auto& x : v) x = rng.normal();
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : cols) {
        double dot = 0.0;
        for (std::size_t j = 0; j < out_dim; ++j) dot += v[j] * b[j];
        for (std::size_t j = 0; j < out_dim; ++j) v[j] -= dot * b[j];
      }
    }
    const double len = norm(v);
    if (len < 1e-9) continue;
    for (auto& x : v) x /= len;
    cols.push_back(std::move(v));
  }

  std::vector<Point> pts;
  pts.reserve(n);
  std::vector<double> jitter(out_dim);
  for (const auto& lp : lattice) {
    std::vector<double> x(out_dim, 0.0);
    for (std::size_t a = 0; a < D; ++a) {
      for (std::size_t j = 0; j < out_dim; ++j) {
        x[j] += spread * static_cast<double>(lp[a]) * cols[a][j];
      }
    }
    double len = 0.0;
    for (auto& v : jitter) {
      v = rng.normal();
      len += v * v;
    }
    const double amount = spread / 10.0 * rng.uniform01() / std::sqrt(len);
    for (std::size_t j = 0; j < out_dim; ++j) x[j] += amount * jitter[j];
    pts.emplace_back(std::move(x));
  }
  return discrete_from(std::move(pts), std::vector<std::uint64_t>(n, 1), 2);
}

namespace {

double param(const InstanceSpec& spec, const std::string& key, std::optional<double> fallback = {}) {
  auto it = spec.params.find(key);
  if (it != spec.params.end()) return it->second;
  require(fallback.has_value(), ErrorCode::kInvalidArgument,
          "family " + spec.family + " needs parameter " + key);
  return *fallback;
}

std::uint64_t count_param(const InstanceSpec& spec, const std::string& key,
                          std::optional<double> fallback = {}) {
  const double v = param(spec, key, fallback);
  require(v >= 0.0 && v == std::floor(v) && v < 1.8e19, ErrorCode::kInvalidArgument,
          "parameter " + key + " must be a nonnegative integer");
  return static_cast<std::uint64_t>(v);
}

}  // namespace

ClusteringInstance subsample_candidates(const ClusteringInstance& inst, std::size_t s,
                                        std::size_t far) {
  const std::size_t n = inst.P.size();
  require(s >= 1 && s <= n, ErrorCode::kInvalidArgument, "subsample size must lie in [1, |P|]");
  std::vector<Point> q;
  for (std::size_t i = 0; i < s; ++i) q.push_back(inst.P.point_copy(i * n / s));
  double extent = 0.0;
  for (std::size_t i = 0; i < n; ++i) extent = std::max(extent, dist(inst.P.point(i), inst.P.point(0)));
  if (extent == 0.0) extent = 1.0;
  const std::size_t d = inst.P.dim();
  for (std::size_t i = 0; i < far; ++i) {
    std::vector<double> c(inst.P.point(0).begin(), inst.P.point(0).end());
    c[0] += 1e4 * extent;
    c[d > 1 ? 1 : 0] += static_cast<double>(i) * extent;
    q.emplace_back(std::move(c));
  }
  return ClusteringInstance(inst.P, WeightedPointSet(q), inst.k, inst.z);
}

ClusteringInstance generate(const InstanceSpec& spec) {
  const auto& f = spec.family;
  auto base = [&]() -> ClusteringInstance {
    if (f == "basis") return gen_basis(count_param(spec, "n"));
    if (f == "decay") return gen_decay(count_param(spec, "n"));
    if (f == "eps-decay") return gen_eps_decay(count_param(spec, "n"), param(spec, "eps"));
    if (f == "candidate") return gen_candidate(count_param(spec, "n"), count_param(spec, "s"));
    if (f == "pairs") return gen_pairs(count_param(spec, "k"));
    if (f == "kernel") return gen_kernel_demo(count_param(spec, "n"), count_param(spec, "d"));
    if (f == "doubling") {
      return gen_doubling(count_param(spec, "n"), count_param(spec, "ddim", 2.0),
                          param(spec, "spread", 1.0), spec.seed.value_or(0));
    }
    fail(ErrorCode::kInvalidArgument, "unknown instance family: " + f);
  }();
  if (f != "pairs" && spec.params.count("k")) base.k = count_param(spec, "k");
  if (spec.params.count("z")) base.z = PowerExponent(param(spec, "z"));
  if (f == "doubling" && spec.params.count("q")) {
    base = subsample_candidates(base, count_param(spec, "q"), count_param(spec, "far", 0.0));
  }
  require(base.k >= 1 && base.k <= base.Q.total_weight(), ErrorCode::kInvalidArgument,
          "k must lie in [1, |Q|]");
  return base;
}

}  // namespace medoidjl
