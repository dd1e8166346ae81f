#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "medoidjl/clustering.hpp"
#include "medoidjl/projection.hpp"

namespace medoidjl {

/// Generator family name plus numeric parameters.
struct InstanceSpec {
  std::string family;
  std::map<std::string, double> params;
  std::optional<std::uint64_t> seed;
};

/// Standard basis e_1..e_n in R^n; k = 2, z = 1, Q = P. n >= 4 and even.
ClusteringInstance gen_basis(std::size_t n);

/// floor(log2(n) / 2) for n >= 1.
std::size_t half_log2(std::uint64_t n);

/// Points 2^{-i} e_i for i = 0..m with m = floor(log2(n)/2), plus the origin
/// with weight n - m - 1 so the total weight is n. Ambient dimension m + 1;
/// k = 1, z = 1, Q = P. n >= 16.
ClusteringInstance gen_decay(std::uint64_t n);

/// As gen_decay with points (1 - eps)^i e_i; k = 2, z = 1.
ClusteringInstance gen_eps_decay(std::uint64_t n, double eps);

/// P = origin with weight n; Q = {2^i e_i : i = 1..s} in R^s; k = 1, z = 1.
/// s is limited to 1000 so every coordinate stays finite; larger s is handled
/// by candidate_ratios.
ClusteringInstance gen_candidate(std::uint64_t n, std::size_t s);

/// Ratios cost(G(P), G q_i) / cost(P, q_i) = |G e_i| for the candidate family
/// with P at the origin, computed from the columns of G (any s = source dim).
std::vector<double> candidate_ratios(const GaussianMap& map);

/// m = (k + 1)/2 pairs (10 i e_1, 10 i e_1 + e_i) for i = 1..m in R^m; z = 1.
/// An even k is raised to k + 1 for the construction and the instance keeps
/// the requested k.
ClusteringInstance gen_pairs(std::size_t k);

/// P = the origin with weight n in R^d; k = 1, z = 1.
ClusteringInstance gen_kernel_demo(std::uint64_t n, std::size_t d);

/// Unit vector c with Gc = 0 for a map with t < d: the standard basis vector
/// with the largest residual against the orthonormalized rows, projected and
/// normalized until its computed norm is exactly 1.
Point kernel_vector(const GaussianMap& map);

/// n points of a ddim_target-dimensional lattice patch (unit `spread`; each
/// coordinate is a sum of distinct powers of 4, points taken in Morton order)
/// mapped by a random isometry into R^{4 ddim_target}, with jitter of norm at
/// most spread/10. k = 2, z = 1, Q = P.
ClusteringInstance gen_doubling(std::size_t n, std::size_t ddim_target, double spread,
                                std::uint64_t seed);

/// Replaces Q by s points of P taken at evenly spaced indices plus `far`
/// candidates about 10^4 times the extent of P away from it (far apart from P
/// but 1 extent apart from each other). Center sets made only of far
/// candidates cost far more than alpha opt for any practical alpha.
ClusteringInstance subsample_candidates(const ClusteringInstance& inst, std::size_t s,
                                        std::size_t far);

/// Dispatch on spec.family: basis | decay | eps-decay | candidate | pairs |
/// kernel | doubling. Params: n, eps, s, k, d, ddim, spread; `k` and `z`
/// override the family defaults when present. For doubling, `q` (with
/// optional `far`) applies subsample_candidates.
ClusteringInstance generate(const InstanceSpec& spec);

}  // namespace medoidjl
