#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "kgraph/kernel.hpp"
#include "kgraph/linear_operator.hpp"
#include "kgraph/point_set.hpp"

namespace kgraph {

// Exact low-rank factorization of the off-diagonal kernel matrix for
// polynomial f: A = left * right - Diag(self terms). rank counts every
// monomial of total degree 2q over the 2d variables, zero coefficients
// included.
struct LowRankFactor {
  int n = 0;
  int rank = 0;
  std::vector<double> left;   // n x rank, row-major; carries the coefficients
  std::vector<double> right;  // rank x n, column j = features of x_j
  std::vector<double> self_term;  // left_i . right_i, the diagonal of left*right

  static constexpr long long kDefaultRankCap = 2'000'000;
};

long long monomial_rank(int d, int q);  // C(2d+2q-1, 2q)

// Feature expansion of (sum_i (u_i - v_i)^2)^q via multinomial coefficients.
LowRankFactor poly_features(const PointSet& P, int q, long long rank_cap = LowRankFactor::kDefaultRankCap);

// Linear combination sum_l coeffs[l] * (z^l features); the low-rank factor of
// a degree-truncated series.
LowRankFactor poly_series_features(const PointSet& P, const std::vector<double>& coeffs,
                                   long long rank_cap = LowRankFactor::kDefaultRankCap);

// left*(right*y) - diag_correction .* y in O(n * rank).
Vec lowrank_adjacency_apply(const LowRankFactor& F, const Vec& diag_correction, const Vec& y);

// Convenience: diag correction = the factor's own self terms, so the result
// matches the zero-diagonal adjacency matrix.
Vec lowrank_adjacency_apply(const LowRankFactor& F, const Vec& y);

// Smallest degree q with sum_{l>q} |c_l| z_max^l <= target; -1 if no degree
// up to max_deg reaches it.
int series_degree_for(const std::vector<double>& coeffs, double z_max, double target, int max_deg);

// Degree-truncated Taylor path: additive error <= eps * ||y||_inf per
// coordinate for kernels carrying a series on [0, z_max].
Vec taylor_adjacency_apply(const PointSet& P, const KernelSpec& k, double eps, const Vec& y,
                           long long rank_cap = LowRankFactor::kDefaultRankCap);

// A KLapE oracle family: answers L_{K,P[idx]} * y for any index subset, with
// additive error eps * w_max * ||y||_inf.
using LapFamily = std::function<Vec(std::span<const int> idx, const Vec& y, double eps)>;
using AdjFamily = std::function<Vec(std::span<const int> idx, const Vec& y, double eps)>;

// Adjacency application from a Laplacian oracle, recursive halving;
// ||result - A y||_inf <= eps * w_max * ||y||_inf.
Vec adj_from_lap(const LapFamily& lap, int n, const Vec& y, double eps);

// Laplacian application from an adjacency oracle (two calls at eps/2).
Vec lap_from_adj(const AdjFamily& adj, int n, const Vec& y, double eps);

// Solves L x = b for x orthogonal to ones, where L = Diag(degrees) - A and
// A is the factored kernel adjacency. Woodbury on the rank-(rank+1) system
// with the (1/n) 11^T nullspace shift folded into the low-rank block.
// Requires b orthogonal to ones (projected internally) and positive degrees.
Vec woodbury_lap_solve(const LowRankFactor& F, const Vec& degrees, const Vec& b);

}  // namespace kgraph
