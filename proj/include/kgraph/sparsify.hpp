#pragma once

#include <cstdint>

#include "kgraph/edge_list.hpp"
#include "kgraph/geometry.hpp"
#include "kgraph/kernel.hpp"
#include "kgraph/point_set.hpp"

namespace kgraph {

// Per-edge leverage-score overestimates p_e, aligned with G.edges.
struct LeverageOverestimates {
  std::vector<double> p;
  double total() const {
    double t = 0.0;
    for (double v : p) t += v;
    return t;
  }
};

struct SparsifyConfig {
  double c_oversample = 4.0;   // C in q = C eps^-2 t log t log(1/delta)
  double c_biclique = 4.0;     // c0 in the per-biclique sample count
  double c_ss = 6.0;           // final-pass samples = c_ss n ln n / eps^2
  int sketch_rows = 64;        // leverage-estimate sketch rows in the final pass
  double sketch_safety = 3.0;  // multiplier lifting estimates to overestimates
  double cg_tol = 1e-8;
  int cg_max_iter = 4000;
  double jl_sq_slack = 2.0;    // squared-distance distortion allowance after projection
};

// Theorem-style oversampling: q = ceil(C eps^-2 t ln t ln(1/delta)) i.i.d.
// draws with probability p_e / t, weight w_e t / (p_e q), duplicates merged.
WeightedEdgeList oversample(const WeightedEdgeList& G, const LeverageOverestimates& p, double eps,
                            double delta, uint64_t seed, double C = 4.0);

// Rows-by-n sketch Z with ||Z b_uv||^2 in (1 +- eps) Reff(u,v) whp.
struct ReffSketch {
  int n = 0;
  int rows = 0;
  std::vector<double> Z;  // rows x n, row-major

  double estimate(int u, int v) const {
    double s = 0.0;
    for (int r = 0; r < rows; ++r) {
      double d = Z[size_t(r) * n + u] - Z[size_t(r) * n + v];
      s += d * d;
    }
    return s;
  }
};

// Z = Pi W^{1/2} B L^+, one CG solve per sketch row. `rows` overrides the
// default ceil(24 ln n / eps^2).
ReffSketch reff_sketch_build(const WeightedEdgeList& G, double eps, uint64_t seed, int rows = 0,
                             double cg_tol = 1e-8, int cg_max_iter = 4000);

// Leverage-proportional resparsification: keeps the graph when it is already
// within the c_ss n ln n / eps^2 budget, otherwise samples that many edges
// with probabilities proportional to sketched leverage overestimates.
WeightedEdgeList ss_resparsify(const WeightedEdgeList& G, double eps, uint64_t seed,
                               const SparsifyConfig& cfg = {});

struct SpectralCheckResult {
  bool pass = false;
  double eig_min = 0.0;
  double eig_max = 0.0;
};

// Dense generalized-eigenvalue check of (1-eps) L_G <= L_H <= (1+eps) L_G on
// the complement of ones. Desk scale only.
SpectralCheckResult spectral_check(const WeightedEdgeList& G, const WeightedEdgeList& H, double eps);

// High-dimensional pipeline: project, 1/2-WSPD, per-biclique uniform
// sampling scaled by the biclique's measured weight ratio, union, final
// resparsify. f must certify (2,L)-multiplicative Lipschitzness on the
// instance's squared-distance range.
WeightedEdgeList sparsify_high_dim(const PointSet& P, const KernelSpec& k, double L, int k_proj,
                                   double eps, uint64_t seed, const SparsifyConfig& cfg = {});

// Low-dimensional pipeline: no projection, 1/L-WSPD, O(1) per-biclique
// weight ratio. f must certify (1+1/L, L)-multiplicative Lipschitzness.
WeightedEdgeList sparsify_low_dim(const PointSet& P, const KernelSpec& k, double L, double eps,
                                  uint64_t seed, const SparsifyConfig& cfg = {});

}  // namespace kgraph
