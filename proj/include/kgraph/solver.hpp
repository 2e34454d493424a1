#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "kgraph/edge_list.hpp"
#include "kgraph/kernel.hpp"
#include "kgraph/linear_operator.hpp"
#include "kgraph/point_set.hpp"
#include "kgraph/sparsify.hpp"

namespace kgraph {

enum class SolveMode { Practical, PaperFaithful };

// SolveG contract: x with ||x - L^+ b||_L <= delta ||L^+ b||_L.
using SolverFn = std::function<Vec(const Vec& b, double delta)>;
// MultiplyG contract: b with ||b - L x||_inf <= eps w_min ||x||_inf.
using MultiplierFn = std::function<Vec(const Vec& x, double eps)>;

struct SolveReport {
  int iterations = 0;
  double error_estimate = 0.0;  // certified relative L-norm error proxy
  double residual_linf = 0.0;
  double wall_ms = 0.0;
  std::string multiplier = "";
  long long sparsifier_edges = 0;
  SolveMode mode = SolveMode::Practical;
};

struct MultiplyTrace {
  std::vector<Vec> residual_inputs;  // x_t sequence of the refinement
  int iterations = 0;
};

// Matrix-vector multiplication from a system solver (iterative refinement in
// the reverse direction). H must be a (1 +- 1/900)-quality sparsifier in
// paper-faithful mode; practical mode tolerates any spectral sparsifier and
// stops on a machine-precision-aware threshold.
Vec multiply_given_solver(const SolverFn& solve, const WeightedEdgeList& H, const Vec& x, double eps,
                          SolveMode mode = SolveMode::Practical, MultiplyTrace* trace = nullptr);

// Preconditioned iterative refinement (Richardson in paper-faithful mode,
// preconditioned CG in practical mode) with L_H^+ as the preconditioner and
// L_G applications going through mult.
Vec solve_given_multiplier(const MultiplierFn& mult, const WeightedEdgeList& H, const Vec& b,
                           double delta, SolveMode mode = SolveMode::Practical,
                           SolveReport* report = nullptr);

struct KlapSolveOptions {
  SolveMode mode = SolveMode::Practical;
  int dense_cap = 4000;       // n above which the dense fallback refuses
  double sparsifier_eps = -1; // <0: mode default (0.1 practical, 1/900 paper)
  SparsifyConfig sparsify;
};

// End-to-end kernel-Laplacian solve: builds a sparsifier, picks a fast
// multiplier (low-rank / Taylor / Gaussian transform / dense fallback), then
// runs preconditioned refinement.
Vec klap_solve(const PointSet& P, const KernelSpec& k, const Vec& b, double delta, uint64_t seed,
               const KlapSolveOptions& opts = {}, SolveReport* report = nullptr);

// The four Laplacian-norm conversion bounds for vectors orthogonal to ones.
struct NormCertificate {
  double lower = 0.0;
  double upper = 0.0;
};
// ||x||_L^2 in [w_min/(2 n^4 alpha^2), n^2 w_max] * ||x||_inf^2
NormCertificate lap_norm_bounds(int n, double w_min, double w_max, double x_linf);
// ||b||_{L^+}^2 in [1/(n^2 w_max), 2 n^4 alpha^2 / w_min] * ||b||_inf^2
NormCertificate pinv_norm_bounds(int n, double w_min, double w_max, double b_linf);

}  // namespace kgraph
