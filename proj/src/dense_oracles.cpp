#include "kgraph/dense_oracles.hpp"

#include <stdexcept>

namespace kgraph {

Vec dense_adjacency_apply(const PointSet& P, const KernelSpec& k, const Vec& y) {
  int n = P.n();
  if (int(y.size()) != n) throw std::invalid_argument("dense_adjacency_apply: bad vector length");
  Vec out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;  // A[i,i] = 0
      s += kernel_eval(k, P.sq_dist(i, j)) * y[j];
    }
    out[i] = s;
  }
  return out;
}

Vec dense_laplacian_apply(const PointSet& P, const KernelSpec& k, const Vec& y) {
  int n = P.n();
  if (int(y.size()) != n) throw std::invalid_argument("dense_laplacian_apply: bad vector length");
  Vec out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      s += kernel_eval(k, P.sq_dist(i, j)) * (y[i] - y[j]);
    }
    out[i] = s;
  }
  return out;
}

Vec dense_adjacency_apply_omp(const PointSet& P, const KernelSpec& k, const Vec& y) {
  int n = P.n();
  if (int(y.size()) != n) throw std::invalid_argument("dense_adjacency_apply_omp: bad vector length");
  Vec out(n, 0.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      s += kernel_eval(k, P.sq_dist(i, j)) * y[j];
    }
    out[i] = s;
  }
  return out;
}

Vec dense_laplacian_apply_omp(const PointSet& P, const KernelSpec& k, const Vec& y) {
  int n = P.n();
  if (int(y.size()) != n) throw std::invalid_argument("dense_laplacian_apply_omp: bad vector length");
  Vec out(n, 0.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      s += kernel_eval(k, P.sq_dist(i, j)) * (y[i] - y[j]);
    }
    out[i] = s;
  }
  return out;
}

Vec kernel_degrees(const PointSet& P, const KernelSpec& k) {
  Vec ones(P.n(), 1.0);
  return dense_adjacency_apply_omp(P, k, ones);
}

WeightedEdgeList kernel_graph(const PointSet& P, const KernelSpec& k) {
  WeightedEdgeList G(P.n());
  for (int i = 0; i < P.n(); ++i)
    for (int j = i + 1; j < P.n(); ++j) {
      double w = kernel_eval(k, P.sq_dist(i, j));
      if (w > 0.0) G.add(i, j, w);
    }
  return G;
}

Vec laplacian_apply(const WeightedEdgeList& G, const Vec& y) {
  if (int(y.size()) != G.n) throw std::invalid_argument("laplacian_apply: bad vector length");
  Vec out(G.n, 0.0);
  for (const auto& e : G.edges) {
    double d = e.w * (y[e.u] - y[e.v]);
    out[e.u] += d;
    out[e.v] -= d;
  }
  return out;
}

LinearOperator dense_adjacency_operator(const PointSet& P, const KernelSpec& k) {
  return {P.n(), LinearOperator::Kind::DenseAdjacency,
          [&P, k](const Vec& y) { return dense_adjacency_apply_omp(P, k, y); }};
}

LinearOperator dense_laplacian_operator(const PointSet& P, const KernelSpec& k) {
  return {P.n(), LinearOperator::Kind::DenseLaplacian,
          [&P, k](const Vec& y) { return dense_laplacian_apply_omp(P, k, y); }};
}

}  // namespace kgraph
