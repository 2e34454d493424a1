#include "kgraph/geometry.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "kgraph/rng.hpp"

namespace kgraph {

int jl_dim_bound(int n, double eps) {
  return int(std::ceil(24.0 * std::log(double(n)) / (eps * eps)));
}

PointSet jl_project(const PointSet& P, int k, uint64_t seed) {
  if (k < 1) throw std::invalid_argument("jl_project: k >= 1 required");
  int n = P.n(), d = P.dim();
  // Q is k x d with +-1/sqrt(k) entries, drawn row-major from the seed.
  std::vector<double> Q(size_t(k) * d);
  Rng rng(seed);
  double s = 1.0 / std::sqrt(double(k));
  for (auto& q : Q) q = rng.sign() * s;

  PointSet out(n, k);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    auto x = P.row(i);
    double* y = out.mutable_row(i);
    for (int r = 0; r < k; ++r) {
      const double* qr = Q.data() + size_t(r) * d;
      double acc = 0.0;
      for (int c = 0; c < d; ++c) acc += qr[c] * x[c];
      y[r] = acc;
    }
  }
  return out;
}

FairSplitTree::FairSplitTree(const PointSet& P) : P_(P) {
  perm_.resize(P.n());
  std::iota(perm_.begin(), perm_.end(), 0);
  nodes_.reserve(size_t(2) * P.n());
  build(0, P.n());
}

int FairSplitTree::build(int begin, int end) {
  int id = int(nodes_.size());
  nodes_.push_back({});
  int d = P_.dim();
  {
    Node nd;
    nd.begin = begin;
    nd.end = end;
    nd.lo.assign(d, std::numeric_limits<double>::infinity());
    nd.hi.assign(d, -std::numeric_limits<double>::infinity());
    for (int t = begin; t < end; ++t) {
      auto x = P_.row(perm_[t]);
      for (int a = 0; a < d; ++a) {
        nd.lo[a] = std::min(nd.lo[a], x[a]);
        nd.hi[a] = std::max(nd.hi[a], x[a]);
      }
    }
    double dg = 0.0;
    for (int a = 0; a < d; ++a) dg += (nd.hi[a] - nd.lo[a]) * (nd.hi[a] - nd.lo[a]);
    nd.diag = std::sqrt(dg);
    nodes_[id] = std::move(nd);
  }
  if (end - begin > 1) {
    const Node& nd = nodes_[id];
    int axis = 0;
    double side = -1.0;
    for (int a = 0; a < d; ++a) {
      double s = nd.hi[a] - nd.lo[a];
      if (s > side) {
        side = s;
        axis = a;
      }
    }
    if (side <= 0.0)
      throw std::runtime_error("FairSplitTree: coincident points (duplicate coordinates)");
    double mid = 0.5 * (nd.lo[axis] + nd.hi[axis]);
    int i = begin, j = end - 1;
    while (i <= j) {
      if (P_.row(perm_[i])[axis] <= mid) {
        ++i;
      } else {
        std::swap(perm_[i], perm_[j]);
        --j;
      }
    }
    // both sides nonempty: the min point is <= mid, the max point is > mid
    int l = build(begin, i);
    int r = build(i, end);
    nodes_[id].left = l;
    nodes_[id].right = r;
  }
  return id;
}

double FairSplitTree::box_dist(const Node& a, const Node& b) const {
  double s = 0.0;
  for (size_t k = 0; k < a.lo.size(); ++k) {
    double g = 0.0;
    if (a.hi[k] < b.lo[k]) g = b.lo[k] - a.hi[k];
    else if (b.hi[k] < a.lo[k]) g = a.lo[k] - b.hi[k];
    s += g * g;
  }
  return std::sqrt(s);
}

Wspd::Wspd(const PointSet& P, double eps_sep) : eps_sep_(eps_sep) {
  if (P.n() < 2) throw std::invalid_argument("build_wspd: n >= 2 required");
  if (!(eps_sep > 0.0 && eps_sep <= 0.9))
    throw std::invalid_argument("build_wspd: eps_sep must lie in (0, 0.9]");
  tree_ = std::make_unique<FairSplitTree>(P);

  const FairSplitTree& T = *tree_;
  std::vector<std::pair<int, int>> work;
  std::vector<int> internal;
  internal.push_back(T.root());
  while (!internal.empty()) {
    int id = internal.back();
    internal.pop_back();
    const auto& nd = T.node(id);
    if (nd.leaf()) continue;
    work.push_back({nd.left, nd.right});
    internal.push_back(nd.left);
    internal.push_back(nd.right);
  }
  while (!work.empty()) {
    auto [ia, ib] = work.back();
    work.pop_back();
    const auto& a = T.node(ia);
    const auto& b = T.node(ib);
    double dist = T.box_dist(a, b);
    double diam = std::max(a.diag, b.diag);
    if (diam <= eps_sep * dist) {
      pairs_.push_back({ia, ib, dist, a.diag, b.diag, 1.0 + (a.diag + b.diag) / dist});
      continue;
    }
    // split the side with the bigger box
    if (a.diag >= b.diag) {
      work.push_back({T.node(ia).left, ib});
      work.push_back({T.node(ia).right, ib});
    } else {
      work.push_back({ia, T.node(ib).left});
      work.push_back({ia, T.node(ib).right});
    }
  }
}

Wspd build_wspd(const PointSet& P, double eps_sep) { return Wspd(P, eps_sep); }

}  // namespace kgraph
