#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace kgraph {

// n points in R^d, row-major doubles. Immutable after construction.
class PointSet {
 public:
  PointSet() : n_(0), d_(0) {}
  PointSet(int n, int d) : n_(n), d_(d), coords_(size_t(n) * d, 0.0) {}
  PointSet(int n, int d, std::vector<double> coords)
      : n_(n), d_(d), coords_(std::move(coords)) {
    if (coords_.size() != size_t(n_) * d_)
      throw std::invalid_argument("PointSet: coords size mismatch");
    for (double c : coords_)
      if (!std::isfinite(c)) throw std::invalid_argument("PointSet: non-finite coordinate");
  }

  int n() const { return n_; }
  int dim() const { return d_; }

  std::span<const double> row(int i) const {
    return {coords_.data() + size_t(i) * d_, size_t(d_)};
  }
  double* mutable_row(int i) { return coords_.data() + size_t(i) * d_; }
  const std::vector<double>& coords() const { return coords_; }

  double sq_dist(int i, int j) const {
    const double* a = coords_.data() + size_t(i) * d_;
    const double* b = coords_.data() + size_t(j) * d_;
    double s = 0.0;
    for (int k = 0; k < d_; ++k) {
      double t = a[k] - b[k];
      s += t * t;
    }
    return s;
  }

  double norm(int i) const {
    const double* a = coords_.data() + size_t(i) * d_;
    double s = 0.0;
    for (int k = 0; k < d_; ++k) s += a[k] * a[k];
    return std::sqrt(s);
  }

  // max over pairs of ||xi-xj|| divided by min over pairs; the distance
  // flavor of the ratio alpha (the weight flavor lives on WeightedEdgeList).
  double distance_ratio() const {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) {
        double z = sq_dist(i, j);
        lo = std::min(lo, z);
        hi = std::max(hi, z);
      }
    if (n_ < 2 || lo == 0.0) throw std::domain_error("distance_ratio: coincident or too few points");
    return std::sqrt(hi / lo);
  }

  // pair of (min, max) squared pairwise distance, brute force
  std::pair<double, double> sq_dist_range() const {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) {
        double z = sq_dist(i, j);
        lo = std::min(lo, z);
        hi = std::max(hi, z);
      }
    return {lo, hi};
  }

  PointSet subset(std::span<const int> idx) const {
    PointSet out(int(idx.size()), d_);
    for (size_t r = 0; r < idx.size(); ++r)
      for (int k = 0; k < d_; ++k) out.coords_[r * d_ + k] = coords_[size_t(idx[r]) * d_ + k];
    return out;
  }

 private:
  int n_, d_;
  std::vector<double> coords_;
};

}  // namespace kgraph
