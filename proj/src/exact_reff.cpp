#include "kgraph/exact_reff.hpp"

#include <stdexcept>

namespace kgraph {

Eigen::MatrixXd dense_laplacian_matrix(const WeightedEdgeList& G) {
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(G.n, G.n);
  for (const auto& e : G.edges) {
    L(e.u, e.u) += e.w;
    L(e.v, e.v) += e.w;
    L(e.u, e.v) -= e.w;
    L(e.v, e.u) -= e.w;
  }
  return L;
}

LaplacianPinv::LaplacianPinv(const WeightedEdgeList& G) {
  G.require_connected("LaplacianPinv");
  int n = G.n;
  // L + (1/n) 11^T is nonsingular and agrees with L on 1-perp; subtracting
  // the rank-one piece from the inverse gives the pseudoinverse.
  Eigen::MatrixXd M = dense_laplacian_matrix(G);
  M.array() += 1.0 / n;
  Eigen::MatrixXd Minv = M.ldlt().solve(Eigen::MatrixXd::Identity(n, n));
  Minv.array() -= 1.0 / n;
  pinv_ = std::move(Minv);
}

double LaplacianPinv::reff(int u, int v) const {
  return pinv_(u, u) + pinv_(v, v) - 2.0 * pinv_(u, v);
}

Eigen::VectorXd LaplacianPinv::solve(const Eigen::VectorXd& b) const { return pinv_ * b; }

double exact_reff(const WeightedEdgeList& G, int u, int v) {
  if (u == v) throw std::invalid_argument("exact_reff: u == v");
  LaplacianPinv pinv(G);
  return pinv.reff(u, v);
}

}  // namespace kgraph
