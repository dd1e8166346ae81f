#include "medoidjl/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>
#include <unordered_map>

namespace medoidjl {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kEmptyInput: return "empty-input";
    case ErrorCode::kDuplicatePoint: return "duplicate-point";
    case ErrorCode::kBudgetExceeded: return "budget-exceeded";
    case ErrorCode::kUnsupported: return "unsupported";
    case ErrorCode::kNotSymmetric: return "not-symmetric";
    case ErrorCode::kParse: return "parse-error";
    case ErrorCode::kIo: return "io-error";
    case ErrorCode::kMissingLevels: return "missing-levels";
  }
  return "unknown";
}

namespace {

void check_finite(Coords c) {
  for (double x : c) {
    require(std::isfinite(x), ErrorCode::kInvalidArgument,
            "point coordinates must be finite");
  }
}

struct CoordsHash {
  std::size_t operator()(Coords c) const noexcept {
    std::uint64_t h = 0x9E3779B97F4A7C15ull;
    for (double x : c) {
      // +0.0 and -0.0 compare equal, so they must hash equal.
      const double v = x == 0.0 ? 0.0 : x;
      h ^= std::bit_cast<std::uint64_t>(v) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

struct CoordsEq {
  bool operator()(Coords a, Coords b) const noexcept {
    return std::equal(a.begin(), a.end(), b.begin(), b.end());
  }
};

}  // namespace

Point::Point(std::vector<double> coords) : coords_(std::move(coords)) {
  require(!coords_.empty(), ErrorCode::kInvalidArgument, "point dimension must be >= 1");
  check_finite(coords_);
}

Point::Point(std::initializer_list<double> coords) : Point(std::vector<double>(coords)) {}

Point Point::zeros(std::size_t dim) { return Point(std::vector<double>(dim, 0.0)); }

Point Point::basis(std::size_t dim, std::size_t index, double scale) {
  require(index < dim, ErrorCode::kInvalidArgument, "basis index out of range");
  std::vector<double> c(dim, 0.0);
  c[index] = scale;
  return Point(std::move(c));
}

PowerExponent::PowerExponent(double z) : z_(z) {
  require(std::isfinite(z) && z >= 1.0, ErrorCode::kInvalidArgument,
          "power exponent z must be >= 1");
}

double PowerExponent::apply(double x) const noexcept {
  if (z_ == 1.0) return x;
  if (z_ == 2.0) return x * x;
  return std::pow(x, z_);
}

WeightedPointSet::WeightedPointSet(std::size_t dim, std::vector<double> flat_coords,
                                   std::vector<std::uint64_t> weights)
    : dim_(dim), coords_(std::move(flat_coords)), weights_(std::move(weights)) {
  validate();
}

WeightedPointSet::WeightedPointSet(const std::vector<Point>& points,
                                   std::vector<std::uint64_t> weights)
    : dim_(points.empty() ? 0 : points.front().dim()), weights_(std::move(weights)) {
  require(!points.empty(), ErrorCode::kEmptyInput, "point set must be nonempty");
  require(points.size() == weights_.size(), ErrorCode::kInvalidArgument,
          "points and weights differ in length");
  coords_.reserve(points.size() * dim_);
  for (const auto& p : points) {
    require(p.dim() == dim_, ErrorCode::kDimensionMismatch,
            "all points must share one dimension");
    coords_.insert(coords_.end(), p.coords().begin(), p.coords().end());
  }
  validate();
}

WeightedPointSet::WeightedPointSet(const std::vector<Point>& points)
    : WeightedPointSet(points, std::vector<std::uint64_t>(points.size(), 1)) {}

WeightedPointSet WeightedPointSet::from_multiset(const std::vector<Point>& points,
                                                 const std::vector<std::uint64_t>& weights) {
  require(points.size() == weights.size(), ErrorCode::kInvalidArgument,
          "points and weights differ in length");
  require(!points.empty(), ErrorCode::kEmptyInput, "point set must be nonempty");
  std::vector<Point> uniq;
  std::vector<std::uint64_t> w;
  std::unordered_map<Coords, std::size_t, CoordsHash, CoordsEq> seen;
  uniq.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto it = seen.find(points[i].coords());
    if (it != seen.end()) {
      w[it->second] += weights[i];
      continue;
    }
    uniq.push_back(points[i]);
    w.push_back(weights[i]);
    // uniq may reallocate; keys point into the caller's vector, which is stable.
    seen.emplace(points[i].coords(), uniq.size() - 1);
  }
  return WeightedPointSet(uniq, std::move(w));
}

void WeightedPointSet::validate() {
  require(dim_ >= 1, ErrorCode::kInvalidArgument, "dimension must be >= 1");
  require(!weights_.empty(), ErrorCode::kEmptyInput, "point set must be nonempty");
  require(coords_.size() == weights_.size() * dim_, ErrorCode::kDimensionMismatch,
          "coordinate buffer does not match size x dim");
  check_finite(coords_);
  total_ = 0;
  for (auto w : weights_) {
    require(w >= 1, ErrorCode::kInvalidArgument, "weights must be positive integers");
    total_ += w;
  }
  std::unordered_map<Coords, std::size_t, CoordsHash, CoordsEq> seen;
  seen.reserve(weights_.size());
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    auto [it, inserted] = seen.emplace(point(i), i);
    require(inserted, ErrorCode::kDuplicatePoint,
            "duplicate point at indices " + std::to_string(it->second) + " and " +
                std::to_string(i) + "; encode multiplicity in the weight");
  }
}

Point WeightedPointSet::point_copy(std::size_t i) const {
  auto c = point(i);
  return Point(std::vector<double>(c.begin(), c.end()));
}

std::ptrdiff_t WeightedPointSet::find(Coords p) const {
  if (p.size() != dim_) return -1;
  for (std::size_t i = 0; i < size(); ++i) {
    if (CoordsEq{}(point(i), p)) return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

WeightedPointSet WeightedPointSet::subset(std::span<const std::size_t> indices) const {
  require(!indices.empty(), ErrorCode::kEmptyInput, "subset must be nonempty");
  std::vector<double> c;
  std::vector<std::uint64_t> w;
  c.reserve(indices.size() * dim_);
  for (auto i : indices) {
    require(i < size(), ErrorCode::kInvalidArgument, "subset index out of range");
    auto p = point(i);
    c.insert(c.end(), p.begin(), p.end());
    w.push_back(weights_[i]);
  }
  return WeightedPointSet(dim_, std::move(c), std::move(w));
}

double squared_dist(Coords p, Coords q) {
  require(p.size() == q.size(), ErrorCode::kDimensionMismatch,
          "distance between points of different dimension");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double diff = p[i] - q[i];
    s += diff * diff;
  }
  return s;
}

double dist(Coords p, Coords q) { return std::sqrt(squared_dist(p, q)); }

double powered_dist(Coords p, Coords q, PowerExponent z) {
  if (z.value() == 2.0) return squared_dist(p, q);
  return z.apply(dist(p, q));
}

double norm(Coords p) {
  double s = 0.0;
  for (double x : p) s += x * x;
  return std::sqrt(s);
}

TriangleBounds triangle_bounds(double d_pr, double d_qr, PowerExponent z, double eps) {
  require(eps > 0.0 && eps < 1.0, ErrorCode::kInvalidArgument, "eps must lie in (0,1)");
  require(d_pr >= 0.0 && d_qr >= 0.0, ErrorCode::kInvalidArgument,
          "distances must be nonnegative");
  const double zv = z.value();
  const double a = z.apply(d_pr);
  const double b = z.apply(d_qr);
  TriangleBounds tb;
  tb.lower = (1.0 - zv * eps) * a - std::pow(eps, -zv) * b;
  tb.upper = std::pow(1.0 + eps, zv - 1.0) * a + std::pow((1.0 + eps) / eps, zv - 1.0) * b;
  return tb;
}

bool leq_rel(double a, double b, double rel_tol) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return a <= b + rel_tol * scale;
}

}  // namespace medoidjl
