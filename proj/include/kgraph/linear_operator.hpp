#pragma once

#include <functional>
#include <vector>

namespace kgraph {

using Vec = std::vector<double>;

// Apply-to-vector contract unifying dense oracles, low-rank factors, the
// Gaussian-transform path, and sparsified Laplacians.
struct LinearOperator {
  enum class Kind { DenseAdjacency, DenseLaplacian, LowRank, Fgt, SparseLaplacian };

  int dim = 0;
  Kind kind = Kind::DenseLaplacian;
  std::function<Vec(const Vec&)> apply;

  Vec operator()(const Vec& x) const { return apply(x); }
};

inline double linf(const Vec& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline void axpy(double a, const Vec& x, Vec& y) {
  for (size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

// Projects x onto the complement of the all-ones direction in place.
inline void remove_mean(Vec& x) {
  double m = 0.0;
  for (double v : x) m += v;
  m /= double(x.size());
  for (double& v : x) v -= m;
}

}  // namespace kgraph
