#include "kgraph/fgt.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace kgraph {

namespace {

constexpr double kCramer = 1.09;

// per-axis geometric/ factorial sum S_p = sum_{a<p} r^a / sqrt(a!)
double axis_sum(double r, int p) {
  double s = 0.0, term = 1.0;
  for (int a = 0; a < p; ++a) {
    s += term;
    term *= r / std::sqrt(double(a + 1));
  }
  return s;
}

double axis_sum_full(double r) {
  double s = 0.0, term = 1.0;
  for (int a = 0; a < 200; ++a) {
    s += term;
    term *= r / std::sqrt(double(a + 1));
    if (term < 1e-18 * s) break;
  }
  return s;
}

long long ipow(long long b, int e) {
  long long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

struct CellKeyLess {
  bool operator()(const std::vector<int>& a, const std::vector<int>& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

std::vector<FgtBox> bucket_points(const PointSet& pts, double side, int cells, int d) {
  std::map<std::vector<int>, FgtBox, CellKeyLess> boxes;
  std::vector<int> cell(d);
  for (int i = 0; i < pts.n(); ++i) {
    auto x = pts.row(i);
    for (int a = 0; a < d; ++a) {
      int c = int(std::floor(x[a] / side));
      cell[a] = std::clamp(c, 0, cells - 1);
    }
    auto it = boxes.find(cell);
    if (it == boxes.end()) {
      FgtBox b;
      b.cell = cell;
      b.center.resize(d);
      for (int a = 0; a < d; ++a) b.center[a] = (cell[a] + 0.5) * side;
      it = boxes.emplace(cell, std::move(b)).first;
    }
    it->second.members.push_back(i);
  }
  std::vector<FgtBox> out;
  out.reserve(boxes.size());
  for (auto& [k, v] : boxes) out.push_back(std::move(v));
  return out;
}

int chebyshev(const std::vector<int>& a, const std::vector<int>& b) {
  int m = 0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Hermite function values h_0..h_top at t: h_0 = exp(-t^2), h_1 = 2t exp(-t^2),
// h_{n+1} = 2t h_n - 2n h_{n-1}.
void hermite_table(double t, int top, double* h) {
  double e = std::exp(-t * t);
  h[0] = e;
  if (top >= 1) h[1] = 2.0 * t * e;
  for (int n = 1; n < top; ++n) h[n + 1] = 2.0 * t * h[n] - 2.0 * n * h[n - 1];
}

}  // namespace

double fgt_truncation_bound(int d, int p, double r, double Q) {
  double K = std::pow(kCramer, d);
  double full = axis_sum_full(r), kept = axis_sum(r, p);
  double dropped = std::pow(full, d) - std::pow(kept, d);
  // one Hermite tail plus (conservatively) two for the translated series
  return 3.0 * K * Q * dropped;
}

FgtErrorBudget fgt_error_budget(const FgtPlan& plan) {
  double K = std::pow(kCramer, plan.d);
  double lf = 1.0;
  for (int i = 1; i <= plan.p; ++i) lf *= i;
  double herm = K * plan.q_l1 * std::pow(1.0 / lf, plan.d / 2.0) *
                std::pow(std::pow(plan.r, plan.p + 1) / (1.0 - plan.r), plan.d);
  double cut = plan.q_l1 * std::exp(-2.0 * plan.r * plan.r * double(plan.k_interact) * plan.k_interact);
  return {herm, 2.0 * herm, cut};
}

FgtPlan fgt_plan(const PointSet& sources, const PointSet& targets, double delta, double eps,
                 double q_l1, long long term_cap) {
  if (!(delta > 0.0) || !(eps > 0.0)) throw std::invalid_argument("fgt_plan: delta, eps > 0 required");
  if (sources.dim() != targets.dim()) throw std::invalid_argument("fgt_plan: dimension mismatch");
  int d = sources.dim();

  FgtPlan plan;
  plan.d = d;
  plan.r = 0.5;
  plan.q_l1 = q_l1;

  //

  // rescale sources and targets into the unit box (isotropic)
  plan.offset.assign(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  auto scan = [&](const PointSet& pts) {
    for (int i = 0; i < pts.n(); ++i) {
      auto x = pts.row(i);
      for (int a = 0; a < d; ++a) {
        plan.offset[a] = std::min(plan.offset[a], x[a]);
        hi[a] = std::max(hi[a], x[a]);
      }
    }
  };
  scan(sources);
  scan(targets);
  double extent = 0.0;
  for (int a = 0; a < d; ++a) extent = std::max(extent, hi[a] - plan.offset[a]);
  if (extent <= 0.0) extent = 1.0;
  plan.inv_scale = 1.0 / extent;
  plan.delta = delta / (extent * extent);

  // cutoff radius: Q exp(-2 r^2 k^2) <= eps/2
  double ratio = 2.0 * q_l1 / eps;
  plan.k_interact = ratio > 1.0
                        ? std::max(1, int(std::ceil(std::sqrt(std::log(ratio)) * std::sqrt(2.0))))
                        : 1;

  // truncation order: componentwise-tail bound <= eps/2
  plan.p = 1;
  while (fgt_truncation_bound(d, plan.p, plan.r, q_l1) > 0.5 * eps) {
    ++plan.p;
    if (ipow(plan.p, d) > term_cap)
      throw std::runtime_error("fgt_plan: p^d exceeds term cap (dimension too high); use the dense path");
  }

  plan.side = plan.r * std::sqrt(2.0 * plan.delta);
  plan.cells_per_axis = std::max(1, int(std::ceil(1.0 / plan.side)));

  return plan;
}

namespace {

PointSet rescale(const PointSet& pts, const FgtPlan& plan) {
  PointSet out(pts.n(), pts.dim());
  for (int i = 0; i < pts.n(); ++i) {
    auto x = pts.row(i);
    double* y = out.mutable_row(i);
    for (int a = 0; a < pts.dim(); ++a) y[a] = (x[a] - plan.offset[a]) * plan.inv_scale;
  }
  return out;
}

void choose_techniques(FgtPlan& plan) {
  long long pd = ipow(plan.p, plan.d);
  for (auto& B : plan.source_boxes) {
    long long in_range_boxes = 0, in_range_targets = 0;
    for (const auto& C : plan.target_boxes) {
      if (chebyshev(B.cell, C.cell) <= plan.k_interact) {
        ++in_range_boxes;
        in_range_targets += (long long)C.members.size();
      }
    }
    long long nb = (long long)B.members.size();
    long long cost1 = in_range_boxes * pd * nb;                          // Taylor from sources
    long long cost2 = pd * nb + pd * in_range_targets;                   // Hermite, direct eval
    long long cost3 = pd * nb + in_range_boxes * plan.d * pd * plan.p;   // Hermite -> Taylor
    if (cost1 <= cost2 && cost1 <= cost3) B.technique = FgtTechnique::DirectTaylor;
    else if (cost2 <= cost3) B.technique = FgtTechnique::HermiteDirect;
    else B.technique = FgtTechnique::HermiteToTaylor;
  }
}

}  // namespace

HermiteExpansion hermite_expand(const FgtPlan& plan, const FgtBox& box, const PointSet& sources,
                                const Vec& q) {
  int d = plan.d, p = plan.p;
  long long pd = ipow(p, d);
  HermiteExpansion H;
  H.center = box.center;
  H.coeffs.assign(pd, 0.0);
  double sdelta = std::sqrt(plan.delta);
  std::vector<double> pw(size_t(d) * p);
  std::vector<int> alpha(d);
  for (int j : box.members) {
    auto s = sources.row(j);
    // pw[a][e] = u_a^e / e!
    for (int a = 0; a < d; ++a) {
      double u = (s[a] - box.center[a]) / sdelta;
      double* row = pw.data() + size_t(a) * p;
      row[0] = 1.0;
      for (int e = 1; e < p; ++e) row[e] = row[e - 1] * u / e;
    }
    std::fill(alpha.begin(), alpha.end(), 0);
    for (long long t = 0; t < pd; ++t) {
      double prod = q[j];
      for (int a = 0; a < d; ++a) prod *= pw[size_t(a) * p + alpha[a]];
      H.coeffs[t] += prod;
      for (int a = 0; a < d; ++a) {
        if (++alpha[a] < p) break;
        alpha[a] = 0;
      }
    }
  }
  return H;
}

double hermite_eval(const FgtPlan& plan, const HermiteExpansion& H, const double* t) {
  int d = plan.d, p = plan.p;
  long long pd = ipow(p, d);
  double sdelta = std::sqrt(plan.delta);
  std::vector<double> h(size_t(d) * p);
  for (int a = 0; a < d; ++a)
    hermite_table((t[a] - H.center[a]) / sdelta, p - 1, h.data() + size_t(a) * p);
  std::vector<int> alpha(d, 0);
  double acc = 0.0;
  for (long long i = 0; i < pd; ++i) {
    double prod = H.coeffs[i];
    for (int a = 0; a < d; ++a) prod *= h[size_t(a) * p + alpha[a]];
    acc += prod;
    for (int a = 0; a < d; ++a) {
      if (++alpha[a] < p) break;
      alpha[a] = 0;
    }
  }
  return acc;
}

TaylorExpansion hermite_to_taylor(const FgtPlan& plan, const HermiteExpansion& H,
                                  const std::vector<double>& target_center) {
  int d = plan.d, p = plan.p;
  long long pd = ipow(p, d);
  double sdelta = std::sqrt(plan.delta);
  TaylorExpansion T;
  T.center = target_center;

  // C_beta = ((-1)^|beta| / beta!) sum_{alpha<p} A_alpha H_{alpha+beta}(u),
  // u = (s_B - t_C)/sqrt(delta). The sum factorizes per axis, so apply the
  // p x p matrix M_a[b][e] = h_{e+b}(u_a) along each mode: d p^{d+1} work.
  std::vector<double> cur = H.coeffs;
  std::vector<double> nxt(pd, 0.0);
  std::vector<double> h(2 * p - 1);
  for (int a = 0; a < d; ++a) {
    double u = (H.center[a] - target_center[a]) / sdelta;
    hermite_table(u, 2 * p - 2, h.data());
    long long stride = ipow(p, a);
    long long outer = pd / (stride * p);
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (long long o = 0; o < outer; ++o) {
      long long base = o * stride * p;
      for (long long inner = 0; inner < stride; ++inner) {
        for (int b = 0; b < p; ++b) {
          double acc = 0.0;
          for (int e = 0; e < p; ++e) acc += h[e + b] * cur[base + inner + stride * e];
          nxt[base + inner + stride * b] = acc;
        }
      }
    }
    cur.swap(nxt);
  }
  // scale by (-1)^|beta| / beta!
  std::vector<int> beta(d, 0);
  std::vector<double> invfact(p);
  invfact[0] = 1.0;
  for (int i = 1; i < p; ++i) invfact[i] = invfact[i - 1] / i;
  for (long long i = 0; i < pd; ++i) {
    double scale = 1.0;
    int parity = 0;
    for (int a = 0; a < d; ++a) {
      scale *= invfact[beta[a]];
      parity += beta[a];
    }
    cur[i] *= (parity % 2 == 0 ? scale : -scale);
    for (int a = 0; a < d; ++a) {
      if (++beta[a] < p) break;
      beta[a] = 0;
    }
  }
  T.coeffs = std::move(cur);
  return T;
}

TaylorExpansion direct_taylor(const FgtPlan& plan, const FgtBox& box, const PointSet& sources,
                              const Vec& q, const std::vector<double>& target_center) {
  int d = plan.d, p = plan.p;
  long long pd = ipow(p, d);
  double sdelta = std::sqrt(plan.delta);
  TaylorExpansion T;
  T.center = target_center;
  T.coeffs.assign(pd, 0.0);
  std::vector<double> h(size_t(d) * p);
  std::vector<int> beta(d);
  for (int j : box.members) {
    auto s = sources.row(j);
    for (int a = 0; a < d; ++a)
      hermite_table((s[a] - target_center[a]) / sdelta, p - 1, h.data() + size_t(a) * p);
    std::fill(beta.begin(), beta.end(), 0);
    for (long long i = 0; i < pd; ++i) {
      double prod = q[j];
      for (int a = 0; a < d; ++a) prod *= h[size_t(a) * p + beta[a]];
      T.coeffs[i] += prod;
      for (int a = 0; a < d; ++a) {
        if (++beta[a] < p) break;
        beta[a] = 0;
      }
    }
  }
  std::vector<double> invfact(p);
  invfact[0] = 1.0;
  for (int i = 1; i < p; ++i) invfact[i] = invfact[i - 1] / i;
  std::fill(beta.begin(), beta.end(), 0);
  for (long long i = 0; i < pd; ++i) {
    double scale = 1.0;
    int parity = 0;
    for (int a = 0; a < d; ++a) {
      scale *= invfact[beta[a]];
      parity += beta[a];
    }
    T.coeffs[i] *= (parity % 2 == 0 ? scale : -scale);
    for (int a = 0; a < d; ++a) {
      if (++beta[a] < p) break;
      beta[a] = 0;
    }
  }
  return T;
}

double taylor_eval(const FgtPlan& plan, const TaylorExpansion& T, const double* t) {
  int d = plan.d, p = plan.p;
  long long pd = ipow(p, d);
  double sdelta = std::sqrt(plan.delta);
  std::vector<double> pw(size_t(d) * p);
  for (int a = 0; a < d; ++a) {
    double v = (t[a] - T.center[a]) / sdelta;
    double* row = pw.data() + size_t(a) * p;
    row[0] = 1.0;
    for (int e = 1; e < p; ++e) row[e] = row[e - 1] * v;
  }
  std::vector<int> beta(d, 0);
  double acc = 0.0;
  for (long long i = 0; i < pd; ++i) {
    double prod = T.coeffs[i];
    for (int a = 0; a < d; ++a) prod *= pw[size_t(a) * p + beta[a]];
    acc += prod;
    for (int a = 0; a < d; ++a) {
      if (++beta[a] < p) break;
      beta[a] = 0;
    }
  }
  return acc;
}

Vec fgt_transform(const PointSet& sources, const PointSet& targets, const Vec& q, double delta,
                  double eps, long long term_cap) {
  if (int(q.size()) != sources.n()) throw std::invalid_argument("fgt_transform: bad q length");
  double q_l1 = 0.0;
  for (double v : q) q_l1 += std::abs(v);
  FgtPlan plan = fgt_plan(sources, targets, delta, eps, q_l1, term_cap);

  PointSet S = rescale(sources, plan);
  PointSet T = rescale(targets, plan);
  plan.source_boxes = bucket_points(S, plan.side, plan.cells_per_axis, plan.d);
  plan.target_boxes = bucket_points(T, plan.side, plan.cells_per_axis, plan.d);
  choose_techniques(plan);

  int nsb = int(plan.source_boxes.size());
  std::vector<HermiteExpansion> herm(nsb);
#pragma omp parallel for schedule(dynamic)
  for (int b = 0; b < nsb; ++b) {
    const auto& B = plan.source_boxes[b];
    if (B.technique != FgtTechnique::DirectTaylor)
      herm[b] = hermite_expand(plan, B, S, q);
  }

  Vec out(targets.n(), 0.0);
  int ntb = int(plan.target_boxes.size());
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < ntb; ++c) {
    const auto& C = plan.target_boxes[c];
    TaylorExpansion acc;
    acc.center = C.center;
    acc.coeffs.assign(ipow(plan.p, plan.d), 0.0);
    std::vector<int> direct_herm;
    for (int b = 0; b < nsb; ++b) {
      const auto& B = plan.source_boxes[b];
      if (chebyshev(B.cell, C.cell) > plan.k_interact) continue;
      switch (B.technique) {
        case FgtTechnique::DirectTaylor: {
          auto T1 = direct_taylor(plan, B, S, q, C.center);
          for (size_t i = 0; i < acc.coeffs.size(); ++i) acc.coeffs[i] += T1.coeffs[i];
          break;
        }
        case FgtTechnique::HermiteToTaylor: {
          auto T3 = hermite_to_taylor(plan, herm[b], C.center);
          for (size_t i = 0; i < acc.coeffs.size(); ++i) acc.coeffs[i] += T3.coeffs[i];
          break;
        }
        case FgtTechnique::HermiteDirect:
          direct_herm.push_back(b);
          break;
      }
    }
    for (int ti : C.members) {
      const double* t = T.row(ti).data();
      double v = taylor_eval(plan, acc, t);
      for (int b : direct_herm) v += hermite_eval(plan, herm[b], t);
      out[ti] = v;
    }
  }
  return out;
}

FgtEvaluator::FgtEvaluator(const PointSet& sources, const Vec& q, double delta, double eps,
                           long long term_cap)
    : plan_(fgt_plan(sources, sources, delta, eps,
                     [&] {
                       double s = 0.0;
                       for (double v : q) s += std::abs(v);
                       return s;
                     }(),
                     term_cap)),
      rescaled_sources_(rescale(sources, plan_)),
      q_(q) {
  plan_.source_boxes = bucket_points(rescaled_sources_, plan_.side, plan_.cells_per_axis, plan_.d);
  expansions_.resize(plan_.source_boxes.size());
  int nsb = int(plan_.source_boxes.size());
#pragma omp parallel for schedule(dynamic)
  for (int b = 0; b < nsb; ++b)
    expansions_[b] = hermite_expand(plan_, plan_.source_boxes[b], rescaled_sources_, q_);
}

double FgtEvaluator::query(std::span<const double> t) const {
  std::vector<double> tr(plan_.d);
  for (int a = 0; a < plan_.d; ++a) tr[a] = (t[a] - plan_.offset[a]) * plan_.inv_scale;
  std::vector<int> cell(plan_.d);
  for (int a = 0; a < plan_.d; ++a)
    cell[a] = std::clamp(int(std::floor(tr[a] / plan_.side)), 0, plan_.cells_per_axis - 1);
  double acc = 0.0;
  for (size_t b = 0; b < plan_.source_boxes.size(); ++b) {
    if (chebyshev(plan_.source_boxes[b].cell, cell) > plan_.k_interact) continue;
    acc += hermite_eval(plan_, expansions_[b], tr.data());
  }
  return acc;
}

}  // namespace kgraph
