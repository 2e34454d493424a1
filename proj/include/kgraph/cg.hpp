#pragma once

#include "kgraph/edge_list.hpp"
#include "kgraph/linear_operator.hpp"

namespace kgraph {

// CSR view of a graph Laplacian for fast repeated applications.
struct LapCsr {
  int n = 0;
  std::vector<int> ptr, idx;
  std::vector<double> val;   // off-diagonal weights
  std::vector<double> diag;  // weighted degrees

  explicit LapCsr(const WeightedEdgeList& G);
  void apply(const Vec& x, Vec& out) const;
};

struct CgResult {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  // ||b - Lx||_inf at exit
};

// Jacobi-preconditioned CG for L x = b on the complement of ones; b is
// projected internally and the returned x has zero mean. Tolerance is
// relative: ||r||_2 <= tol * ||b||_2.
CgResult lap_cg_solve(const LapCsr& L, const Vec& b, Vec& x, double tol, int max_iter);

}  // namespace kgraph
