#pragma once

#include <Eigen/Dense>

#include "kgraph/edge_list.hpp"

namespace kgraph {

Eigen::MatrixXd dense_laplacian_matrix(const WeightedEdgeList& G);

// Dense Laplacian pseudoinverse for desk-scale exact effective resistances.
// One factorization, O(1) per pair query afterwards.
class LaplacianPinv {
 public:
  explicit LaplacianPinv(const WeightedEdgeList& G);

  double reff(int u, int v) const;
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;  // L^+ b
  const Eigen::MatrixXd& pinv() const { return pinv_; }

 private:
  Eigen::MatrixXd pinv_;
};

// b_uv^T L^+ b_uv via dense pseudoinverse. Errors if G is disconnected.
double exact_reff(const WeightedEdgeList& G, int u, int v);

}  // namespace kgraph
