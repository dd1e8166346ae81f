#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "medoidjl/error.hpp"

namespace medoidjl {

using Coords = std::span<const double>;

/// A point of R^d with finite coordinates, d >= 1.
class Point {
 public:
  explicit Point(std::vector<double> coords);
  Point(std::initializer_list<double> coords);

  static Point zeros(std::size_t dim);
  /// Standard basis vector e_index scaled by `scale`.
  static Point basis(std::size_t dim, std::size_t index, double scale = 1.0);

  std::size_t dim() const noexcept { return coords_.size(); }
  Coords coords() const noexcept { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }
  operator Coords() const noexcept { return coords_; }

  bool operator==(const Point&) const = default;

 private:
  std::vector<double> coords_;
};

/// Exponent z >= 1 of the clustering objective.
class PowerExponent {
 public:
  explicit PowerExponent(double z);
  double value() const noexcept { return z_; }
  /// x^z with exact fast paths for z = 1 and z = 2.
  double apply(double x) const noexcept;

 private:
  double z_;
};

/// Finite multiset of points; repeated points are stored once with an integer
/// multiplicity.
class WeightedPointSet {
 public:
  WeightedPointSet(std::size_t dim, std::vector<double> flat_coords,
                   std::vector<std::uint64_t> weights);
  WeightedPointSet(const std::vector<Point>& points,
                   std::vector<std::uint64_t> weights);
  /// Unit weights.
  explicit WeightedPointSet(const std::vector<Point>& points);

  /// Merges exact duplicates by summing their weights; first occurrence order
  /// is kept.
  static WeightedPointSet from_multiset(const std::vector<Point>& points,
                                        const std::vector<std::uint64_t>& weights);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return weights_.size(); }
  /// n = sum of weights.
  std::uint64_t total_weight() const noexcept { return total_; }

  Coords point(std::size_t i) const {
    return Coords(coords_.data() + i * dim_, dim_);
  }
  Point point_copy(std::size_t i) const;
  std::uint64_t weight(std::size_t i) const { return weights_[i]; }
  const std::vector<std::uint64_t>& weights() const noexcept { return weights_; }
  const std::vector<double>& flat() const noexcept { return coords_; }

  /// Index of a stored point equal to `p`, or -1.
  std::ptrdiff_t find(Coords p) const;

  /// Subset by index list, keeping weights.
  WeightedPointSet subset(std::span<const std::size_t> indices) const;

 private:
  void validate();

  std::size_t dim_;
  std::vector<double> coords_;
  std::vector<std::uint64_t> weights_;
  std::uint64_t total_ = 0;
};

double dist(Coords p, Coords q);
double squared_dist(Coords p, Coords q);
double powered_dist(Coords p, Coords q, PowerExponent z);
double norm(Coords p);

struct TriangleBounds {
  double lower;
  double upper;
};

/// Bounds on dist(p,q)^z given dist(p,r) and dist(q,r), valid in any metric:
///   (1 - z eps) d_pr^z - eps^-z d_qr^z <= dist(p,q)^z
///   dist(p,q)^z <= (1+eps)^(z-1) d_pr^z + ((1+eps)/eps)^(z-1) d_qr^z
TriangleBounds triangle_bounds(double d_pr, double d_qr, PowerExponent z, double eps);

/// Relative comparison helper used by the checkers: a <= b up to rel_tol.
bool leq_rel(double a, double b, double rel_tol = 1e-9);

}  // namespace medoidjl
