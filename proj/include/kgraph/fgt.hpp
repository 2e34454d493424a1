#pragma once

#include <cstdint>
#include <vector>

#include "kgraph/linear_operator.hpp"
#include "kgraph/point_set.hpp"

namespace kgraph {

// Fast Gaussian transform: x_j = sum_i q_i exp(-||t_j - s_i||^2 / delta) to
// additive error eps, via box decomposition, truncated Hermite expansions,
// and Hermite-to-Taylor translation.

enum class FgtTechnique { DirectTaylor, HermiteDirect, HermiteToTaylor };

struct FgtBox {
  std::vector<int> cell;        // lattice coordinates
  std::vector<double> center;   // rescaled coordinates
  std::vector<int> members;     // point indices
  FgtTechnique technique = FgtTechnique::HermiteDirect;
};

struct FgtPlan {
  int d = 0;
  double r = 0.5;          // box side scale; boxes have side r*sqrt(2*delta)
  int p = 1;               // truncation order (p^d tensor terms, orders 0..p-1)
  int k_interact = 1;      // boxes beyond Chebyshev distance k are dropped
  double delta = 1.0;      // width in rescaled coordinates
  double side = 0.0;       // box side in rescaled coordinates
  int cells_per_axis = 1;
  double q_l1 = 0.0;

  // affine rescale metadata: x' = (x - offset) * inv_scale
  std::vector<double> offset;
  double inv_scale = 1.0;

  std::vector<FgtBox> source_boxes;
  std::vector<FgtBox> target_boxes;

  static constexpr long long kDefaultTermCap = 10'000'000;
};

// Hermite expansion about a source-box center: coefficients A_alpha for all
// alpha < p componentwise, A_alpha = (1/alpha!) sum_j q_j ((s_j-s_B)/sqrt(delta))^alpha.
struct HermiteExpansion {
  std::vector<double> center;
  std::vector<double> coeffs;  // p^d, colexicographic (axis 0 fastest)
};

// Taylor expansion about a target-box center.
struct TaylorExpansion {
  std::vector<double> center;
  std::vector<double> coeffs;  // p^d, colexicographic
};

struct FgtErrorBudget {
  double hermite_bound;  // K Q (1/p!)^{d/2} (r^{p+1}/(1-r))^d, K = 1.09^d
  double taylor_bound;   // 2 K Q (...) for the translated-then-truncated series
  double cutoff_bound;   // Q exp(-2 r^2 k^2)
};

// Truncation bound actually used for order selection: the componentwise
// truncation drops every multi-index with some coordinate >= p, so the
// per-axis tails combine as a difference of d-th powers rather than a d-th
// power of one tail. Coincides with the classical bound at d = 1.
double fgt_truncation_bound(int d, int p, double r, double Q);

FgtPlan fgt_plan(const PointSet& sources, const PointSet& targets, double delta, double eps,
                 double q_l1, long long term_cap = FgtPlan::kDefaultTermCap);

FgtErrorBudget fgt_error_budget(const FgtPlan& plan);

HermiteExpansion hermite_expand(const FgtPlan& plan, const FgtBox& box, const PointSet& sources,
                                const Vec& q);

// Evaluates the (truncated) Hermite expansion at a rescaled target point.
double hermite_eval(const FgtPlan& plan, const HermiteExpansion& H, const double* t);

TaylorExpansion hermite_to_taylor(const FgtPlan& plan, const HermiteExpansion& H,
                                  const std::vector<double>& target_center);

TaylorExpansion direct_taylor(const FgtPlan& plan, const FgtBox& box, const PointSet& sources,
                              const Vec& q, const std::vector<double>& target_center);

double taylor_eval(const FgtPlan& plan, const TaylorExpansion& T, const double* t);

// The full transform; |out_j - G(t_j)| <= eps for every target.
Vec fgt_transform(const PointSet& sources, const PointSet& targets, const Vec& q, double delta,
                  double eps, long long term_cap = FgtPlan::kDefaultTermCap);

// Online flavor: plan + per-source-box expansions once, then query targets.
class FgtEvaluator {
 public:
  FgtEvaluator(const PointSet& sources, const Vec& q, double delta, double eps,
               long long term_cap = FgtPlan::kDefaultTermCap);
  double query(std::span<const double> t) const;
  const FgtPlan& plan() const { return plan_; }

 private:
  FgtPlan plan_;
  PointSet rescaled_sources_;
  Vec q_;
  std::vector<HermiteExpansion> expansions_;
};

}  // namespace kgraph
