#include "medoidjl/projection.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "medoidjl/rng.hpp"

namespace medoidjl {

GaussianMap GaussianMap::sample(std::size_t d, std::size_t t, std::uint64_t seed) {
  require(d >= 1 && t >= 1, ErrorCode::kInvalidArgument, "map dimensions must be >= 1");
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(t));
  std::vector<double> e(t * d);
  for (auto& x : e) x = rng.normal() * scale;
  return GaussianMap(t, d, seed, std::move(e), true);
}

GaussianMap GaussianMap::from_matrix(std::size_t t, std::size_t d, std::vector<double> entries,
                                     std::uint64_t seed) {
  require(d >= 1 && t >= 1, ErrorCode::kInvalidArgument, "map dimensions must be >= 1");
  require(entries.size() == t * d, ErrorCode::kDimensionMismatch,
          "matrix entry count does not match t x d");
  for (double x : entries) {
    require(std::isfinite(x), ErrorCode::kInvalidArgument, "map entries must be finite");
  }
  return GaussianMap(t, d, seed, std::move(entries), false);
}

GaussianMap GaussianMap::identity(std::size_t d) {
  std::vector<double> e(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) e[i * d + i] = 1.0;
  return from_matrix(d, d, std::move(e));
}

void GaussianMap::apply_into(Coords x, std::span<double> out) const {
  require(x.size() == d_, ErrorCode::kDimensionMismatch,
          "map source dimension " + std::to_string(d_) + " does not match point dimension " +
              std::to_string(x.size()));
  require(out.size() == t_, ErrorCode::kDimensionMismatch, "output buffer must have size t");
  for (std::size_t r = 0; r < t_; ++r) {
    const double* row = entries_.data() + r * d_;
    double s = 0.0;
    for (std::size_t c = 0; c < d_; ++c) s += row[c] * x[c];
    out[r] = s;
  }
}

Point apply(const GaussianMap& map, Coords p) {
  std::vector<double> out(map.target_dim());
  map.apply_into(p, out);
  return Point(std::move(out));
}

WeightedPointSet apply_set(const GaussianMap& map, const WeightedPointSet& P) {
  require(P.dim() == map.source_dim(), ErrorCode::kDimensionMismatch,
          "map source dimension does not match point set");
  const std::size_t t = map.target_dim();
  std::vector<double> img(P.size() * t);
  for (std::size_t i = 0; i < P.size(); ++i) {
    map.apply_into(P.point(i), std::span<double>(img.data() + i * t, t));
  }
  return WeightedPointSet(t, std::move(img), P.weights());
}

namespace {

constexpr std::array<char, 8> kMapMagic = {'G', 'J', 'L', 'M', 'A', 'P', '0', '1'};

template <typename T>
void put_le(std::ostream& out, T v) {
  std::array<char, sizeof(T)> b;
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b.data(), b.size());
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> b{};
  in.read(reinterpret_cast<char*>(b.data()), b.size());
  require(static_cast<bool>(in), ErrorCode::kParse, "truncated map file");
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void write_map_binary(std::ostream& out, const GaussianMap& map) {
  out.write(kMapMagic.data(), kMapMagic.size());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(map.target_dim()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(map.source_dim()));
  put_le<std::uint64_t>(out, map.seed());
  for (double x : map.entries()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(x));
}

GaussianMap read_map_binary(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  require(static_cast<bool>(in) && magic == kMapMagic, ErrorCode::kParse, "bad map magic");
  const auto t = get_le<std::uint32_t>(in);
  const auto d = get_le<std::uint32_t>(in);
  const auto seed = get_le<std::uint64_t>(in);
  std::vector<double> e(static_cast<std::size_t>(t) * d);
  for (auto& x : e) x = std::bit_cast<double>(get_le<std::uint64_t>(in));
  return GaussianMap::from_matrix(t, d, std::move(e), seed);
}

const char* to_string(RecipeVariant v) {
  switch (v) {
    case RecipeVariant::kForAllCentersPartitions: return "forall-centers-partitions";
    case RecipeVariant::kRelaxed: return "relaxed";
    case RecipeVariant::kCandidateMultiplicative: return "candidate-multiplicative";
    case RecipeVariant::kCandidateRelaxed: return "candidate-relaxed";
    case RecipeVariant::kFixedSolution: return "fixed-solution";
  }
  return "unknown";
}

RecipeVariant parse_recipe_variant(const std::string& name) {
  for (auto v : {RecipeVariant::kForAllCentersPartitions, RecipeVariant::kRelaxed,
                 RecipeVariant::kCandidateMultiplicative, RecipeVariant::kCandidateRelaxed,
                 RecipeVariant::kFixedSolution}) {
    if (name == to_string(v)) return v;
  }
  fail(ErrorCode::kInvalidArgument, "unknown recipe variant: " + name);
}

namespace {

double clamped_log2(double x) {
  const double v = x > 0.0 ? std::log2(x) : -HUGE_VAL;
  return std::max(1.0, v);
}

double clamped_loglog2(double x) {
  const double inner = x > 0.0 ? std::log2(x) : 0.0;
  return clamped_log2(inner);
}

}  // namespace

std::size_t target_dimension(const DimensionRecipe& r) {
  require(r.eps > 0.0 && r.eps < 0.5, ErrorCode::kInvalidArgument, "recipe eps must lie in (0, 1/2)");
  require(r.z >= 1.0, ErrorCode::kInvalidArgument, "recipe z must be >= 1");
  require(r.k >= 1, ErrorCode::kInvalidArgument, "recipe k must be >= 1");
  require(r.ddim >= 0.0, ErrorCode::kInvalidArgument, "recipe ddim must be >= 0");
  require(r.c_const > 0.0, ErrorCode::kInvalidArgument, "recipe c_const must be > 0");
  const bool relaxed =
      r.variant == RecipeVariant::kRelaxed || r.variant == RecipeVariant::kCandidateRelaxed;
  if (relaxed) {
    require(r.alpha.has_value(), ErrorCode::kInvalidArgument, "relaxed recipes require alpha");
    require(*r.alpha > 2.0, ErrorCode::kInvalidArgument, "alpha must exceed 2");
  }
  const double log_z_eps = clamped_log2(r.z / r.eps);
  const double log_k = clamped_log2(static_cast<double>(r.k));
  double terms = 0.0;
  switch (r.variant) {
    case RecipeVariant::kForAllCentersPartitions:
      require(r.n.has_value(), ErrorCode::kInvalidArgument, "recipe requires n");
      terms = r.ddim * log_z_eps + log_k + clamped_loglog2(static_cast<double>(*r.n));
      break;
    case RecipeVariant::kRelaxed:
      terms = r.ddim * log_z_eps + r.z * log_z_eps + log_k + clamped_loglog2(*r.alpha);
      break;
    case RecipeVariant::kCandidateMultiplicative:
      require(r.s.has_value(), ErrorCode::kInvalidArgument, "recipe requires s");
      terms = clamped_log2(static_cast<double>(*r.s)) + r.z * log_z_eps;
      break;
    case RecipeVariant::kCandidateRelaxed:
      require(r.n.has_value(), ErrorCode::kInvalidArgument, "recipe requires n");
      terms = r.ddim * log_z_eps + log_k + clamped_loglog2(*r.alpha) +
              clamped_loglog2(static_cast<double>(*r.n));
      break;
    case RecipeVariant::kFixedSolution:
      terms = clamped_log2(1.0 / r.eps);
      break;
  }
  const double t = r.c_const * r.z * r.z / (r.eps * r.eps) * terms;
  return static_cast<std::size_t>(std::max(1.0, std::ceil(t - 1e-9)));
}

}  // namespace medoidjl
