#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "kgraph/point_set.hpp"

namespace kgraph {

// Random +-1/sqrt(k) projection onto k dimensions.
PointSet jl_project(const PointSet& P, int k, uint64_t seed);

// Row count that makes all pairwise squared distances (1 +- eps) with
// probability at least 1 - 1/n.
int jl_dim_bound(int n, double eps);

// Fair-split tree: axis-parallel midpoint split of the longest bounding-box
// side, ties broken toward the lowest axis. Point indices are stored as
// contiguous ranges of a permutation, one node per range.
class FairSplitTree {
 public:
  struct Node {
    int begin, end;  // range in perm
    std::vector<double> lo, hi;
    int left = -1, right = -1;
    double diag = 0.0;  // bounding box diagonal
    int size() const { return end - begin; }
    bool leaf() const { return left < 0; }
  };

  explicit FairSplitTree(const PointSet& P);

  const Node& node(int i) const { return nodes_[i]; }
  int root() const { return 0; }
  std::span<const int> points(const Node& nd) const {
    return {perm_.data() + nd.begin, size_t(nd.end - nd.begin)};
  }
  // min distance between bounding boxes
  double box_dist(const Node& a, const Node& b) const;

 private:
  int build(int begin, int end);
  const PointSet& P_;
  std::vector<int> perm_;
  std::vector<Node> nodes_;
};

// Well-separated pair decomposition. Every unordered point pair lands in
// exactly one (A,B); max(diam A, diam B) <= eps_sep * dist(A,B), certified
// on bounding boxes (diagonal vs box distance).
class Wspd {
 public:
  struct Pair {
    int a, b;           // node ids in the tree
    double box_dist;    // lower bound on inter-set point distance
    double diam_a, diam_b;
    // Certified upper bound on (max inter-set distance)/(min inter-set
    // distance) inside the biclique: 1 + (diam_a + diam_b)/box_dist.
    double ratio_cert;
  };

  Wspd(const PointSet& P, double eps_sep);

  const FairSplitTree& tree() const { return *tree_; }
  const std::vector<Pair>& pairs() const { return pairs_; }
  std::span<const int> side_a(const Pair& p) const { return tree_->points(tree_->node(p.a)); }
  std::span<const int> side_b(const Pair& p) const { return tree_->points(tree_->node(p.b)); }
  double eps_sep() const { return eps_sep_; }

 private:
  std::unique_ptr<FairSplitTree> tree_;
  std::vector<Pair> pairs_;
  double eps_sep_;
};

Wspd build_wspd(const PointSet& P, double eps_sep);

}  // namespace kgraph
