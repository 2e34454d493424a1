#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "kgraph/edge_list.hpp"
#include "kgraph/point_set.hpp"
#include "kgraph/sparsify.hpp"

namespace kgraph {

// Sparsification machinery for K(u,v) = |<u,v>| graphs: unweighted
// inner-product graph clustering, a sampled effective-resistance oracle,
// l1-sketch row-sum samplers, and (zeta,kappa,delta)-covers.

struct IpConfig {
  // Clustering / resistance-oracle constants. The paper's values are far too
  // conservative to run; these practical defaults are calibrated and every
  // guarantee they feed is validated against exact resistances in tests.
  double c1 = 8.0;              // accept a cluster once it holds n/c1 vertices
  double c2 = 24.0;             // resistance threshold c2/n (query cut at c2/(2n))
  int c5_subgraphs = 0;         // 0 -> max(6, ceil(2 ln n)) sampled subgraphs
  double c6_edge_factor = 16.0; // sampled pairs per subgraph = c6 * n
  int reff_rows = 0;            // sketch rows per subgraph; 0 -> ceil(24 ln n)
  int lowdiam_tries = 64;
  int min_cluster_n = 8;

  // Pair sampler.
  int sampler_rows = 256;          // l1-sketch rows per tree node
  int sampler_exact_cutoff = 256;  // exact row sums below this node size
  double zeta_safety = 2.0;        // head-room multiplier on the zeta mass

  // Cover.
  double xi_log = 0.0;  // spread threshold ln(xi); 0 -> 4 ln(d n). The paper's
                        // (dn)^1000 overflows doubles, so xi lives in log space.

  // Oversampling.
  double c_oversample = 4.0;
  double sample_cap = 32.0;  // cap draws at sample_cap * n ln n / eps^2
  SparsifyConfig resparsify;
};

// Unit-weight graph with an edge iff |<u,v>| >= ||u|| ||v|| / (d+1).
WeightedEdgeList ip_unweighted_graph(const PointSet& X);
// Complete |<u,v>|-weighted graph, zero weights dropped.
WeightedEdgeList ip_weighted_graph(const PointSet& X);

// Sampled effective-resistance oracle: c5 uniformly sampled reweighted
// subgraphs, a resistance sketch per connected component of each, query =
// max over subgraphs (infinity when every subgraph separates the pair).
class IpReffOracle {
 public:
  IpReffOracle(const PointSet& X, uint64_t seed, const IpConfig& cfg);
  double query(int u, int v) const;
  int n() const { return n_; }

 private:
  struct Sub {
    std::vector<int> comp_of;
    std::vector<int> local_of;
    std::vector<ReffSketch> sketches;  // per component (size >= 2)
    std::vector<int> sketch_of_comp;   // -1 for singleton components
  };
  int n_ = 0;
  std::vector<Sub> subs_;
};

// Random low-effective-resistance cluster: picks random centers until the
// oracle admits n/c1 vertices within the resistance threshold.
std::vector<int> low_diam_set(const PointSet& X, uint64_t seed, const IpConfig& cfg = {});

// Streaming l1 sketch: rows of i.i.d. standard Cauchy entries, recovery by
// the median of absolute coordinates. (1 +- eps) ||v||_1 w.p. >= 1 - delta.
struct L1Sketch {
  int dim = 0;
  int rows = 0;
  uint64_t seed = 0;

  Vec apply(const Vec& v) const;
  double recover(const Vec& sketch) const;
};
L1Sketch l1_sketch(int dim, double eps, double delta, uint64_t seed);

// Approximate row-sum structure: estimates sum_{v in S} |<u,v>| for query u.
// Exact summation below the cutoff, Cauchy sketch + median above it.
struct RowSumSketch {
  const PointSet* X = nullptr;
  std::vector<int> members;
  int rows = 0;
  std::vector<double> sketch_vectors;  // rows x d when sketched; empty when exact
  double estimate(std::span<const double> u) const;
};

// Hierarchical pair sampler over (u in some S0 of the family, v in S1),
// with p_uv proportional (within a small factor) to gamma_{S0} |<u,v>|
// normalized per set. Probabilities are queryable and exactly match the
// draw distribution.
class IpSampler {
 public:
  IpSampler(const PointSet& X, const std::vector<std::vector<int>>& family,
            const std::vector<double>& gamma, const std::vector<int>& s2, uint64_t seed,
            const IpConfig& cfg);

  struct Draw {
    int s0_index;
    int u;  // original point index
    int v;  // original point index
  };
  std::optional<Draw> draw(Rng& rng) const;
  // Probability that a single draw returns (u from S0 #s0_index, v).
  double pair_prob(int s0_index, int member_index, int v_position) const;
  int lift_rows() const { return int(lift_owner_.size()); }

 private:
  struct Node {
    int begin, end, left = -1, right = -1;
    RowSumSketch sums;
  };
  double node_sum(int lift_row, int node) const;

  const PointSet* X_;
  std::vector<int> s2_;
  std::vector<std::pair<int, int>> lift_owner_;  // (s0 index, member index)
  std::vector<int> lift_point_;
  std::vector<double> lift_scale_;  // gamma_S / D_S per lifted row
  std::vector<double> u_weight_;    // draw weights on the u side
  std::vector<double> u_cum_;
  std::vector<Node> nodes_;
  mutable std::vector<double> cache_;  // lift_rows x nodes, NaN = unset
};

// One (family, target) entry of a (zeta,kappa,delta)-cover. delta/kappa/zeta
// are the dimensionless per-(S0,S1) coefficients of the resistance bound
// Reff(u,v) <= delta/w_uv + kappa/max_w + zeta/sum_w.
struct IpCoverEntry {
  std::vector<std::vector<int>> family;
  std::vector<int> target;
  std::vector<double> delta_c, kappa_c, zeta_c;  // one per S0
};

struct IpCover {
  std::vector<IpCoverEntry> entries;
  double sparsity() const;
  double efficiency() const;
};

IpCover build_cover(const PointSet& X, uint64_t seed, const IpConfig& cfg = {});

// Cover + samplers + the closed-form total mass t; exposes the per-pair
// leverage overestimate r_uv = t * Pr[draw = {u,v}] for validation.
class IpOversampler {
 public:
  IpOversampler(const PointSet& X, uint64_t seed, const IpConfig& cfg = {});

  double t() const { return t_; }
  double r(int u, int v) const;
  std::optional<std::pair<int, int>> draw_pair(Rng& rng) const;
  const IpCover& cover() const { return cover_; }

 private:
  const PointSet* X_;
  IpCover cover_;
  std::vector<std::unique_ptr<IpSampler>> samplers_;  // one per entry (null if no zeta mass)
  std::vector<double> zeta_mass_;                     // per entry, includes safety
  std::vector<double> dk_mass_;                       // per entry
  std::vector<double> zeta_cum_, dk_cum_;
  // per-entry lookup tables for r queries
  std::vector<std::vector<int>> target_pos_;               // entry -> n-vector (-1 outside)
  std::vector<std::vector<std::vector<int>>> member_pos_;  // entry -> s0 -> n-vector
  double zeta_total_ = 0.0, dk_total_ = 0.0, t_ = 0.0;
};

// Full pipeline: cover, oversampling with cover, final resparsify.
WeightedEdgeList ip_sparsify(const PointSet& X, double eps, double delta, uint64_t seed,
                             const IpConfig& cfg = {});

}  // namespace kgraph
