#include "kgraph/solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "kgraph/cg.hpp"
#include "kgraph/dense_oracles.hpp"
#include "kgraph/fgt.hpp"
#include "kgraph/matvec.hpp"
#include "kgraph/rng.hpp"

namespace kgraph {

namespace {

double safe_pow(double b, double e) {
  double v = std::pow(b, e);
  if (v == 0.0 || !std::isfinite(v)) return v == 0.0 ? 1e-300 : 1e300;
  return v;
}

}  // namespace

NormCertificate lap_norm_bounds(int n, double w_min, double w_max, double x_linf) {
  double alpha = w_max / w_min;
  double x2 = x_linf * x_linf;
  return {w_min / (2.0 * safe_pow(n, 4) * alpha * alpha) * x2, double(n) * n * w_max * x2};
}

NormCertificate pinv_norm_bounds(int n, double w_min, double w_max, double b_linf) {
  double alpha = w_max / w_min;
  double b2 = b_linf * b_linf;
  return {b2 / (double(n) * n * w_max), 2.0 * safe_pow(n, 4) * alpha * alpha / w_min * b2};
}

Vec multiply_given_solver(const SolverFn& solve, const WeightedEdgeList& H, const Vec& x_in,
                          double eps, SolveMode mode, MultiplyTrace* trace) {
  int n = H.n;
  if (int(x_in.size()) != n) throw std::invalid_argument("multiply_given_solver: bad vector length");
  Vec x = x_in;
  remove_mean(x);
  double x0_linf = linf(x);
  Vec b_acc(n, 0.0);
  if (x0_linf == 0.0) return b_acc;

  double w_min = H.w_min(), w_max = H.w_max();
  double alpha = w_max / w_min;
  double log_ane = std::log(std::max(3.0, alpha * n / eps));
  int cap = int(std::ceil(log_ane * log_ane)) + 5;
  double tau = eps * x0_linf / (log_ane * log_ane);

  // The recursion threshold tau/(n^10 alpha^5) underflows doubles for modest
  // n and alpha; both modes floor it at the machine-precision scale.
  double floor_thr = x0_linf * 1e-15;
  double thr = mode == SolveMode::PaperFaithful
                   ? std::max(tau / (safe_pow(n, 10) * safe_pow(alpha, 5)), floor_thr)
                   : std::max(tau * 1e-12, floor_thr);
  double delta_inner = mode == SolveMode::PaperFaithful
                           ? std::max(tau * std::sqrt(w_min) / (safe_pow(n, 10) * safe_pow(alpha, 5)), 1e-14)
                           : 1e-12;

  Vec x_cur = x;
  int it = 0;
  for (; it < cap; ++it) {
    if (linf(x_cur) <= thr) break;
    Vec lhx = laplacian_apply(H, x_cur);
    Vec x_main = solve(lhx, delta_inner);
    remove_mean(x_main);
    for (int i = 0; i < n; ++i) {
      b_acc[i] += lhx[i];
      x_cur[i] -= x_main[i];
    }
    if (trace) trace->residual_inputs.push_back(x_cur);
  }
  if (it >= cap && linf(x_cur) > thr)
    throw std::runtime_error("multiply_given_solver: iteration cap exceeded, residual " +
                             std::to_string(linf(x_cur)));
  if (trace) trace->iterations = it;
  return b_acc;
}

Vec solve_given_multiplier(const MultiplierFn& mult, const WeightedEdgeList& H, const Vec& b_in,
                           double delta, SolveMode mode, SolveReport* report) {
  auto t0 = std::chrono::steady_clock::now();
  int n = H.n;
  if (int(b_in.size()) != n) throw std::invalid_argument("solve_given_multiplier: bad vector length");
  H.require_connected("solve_given_multiplier");
  Vec b = b_in;
  remove_mean(b);

  LapCsr Lh(H);
  double alpha = H.w_max() / H.w_min();
  double eps_mult = mode == SolveMode::PaperFaithful
                        ? std::max(delta / (safe_pow(n, 4) * alpha * alpha), 1e-14)
                        : std::max(delta * 1e-3, 1e-13);

  auto precond = [&](const Vec& r) {
    Vec z;
    CgResult res = lap_cg_solve(Lh, r, z, 1e-10, 20000);
    if (!res.converged)
      throw std::runtime_error("solve_given_multiplier: inner solve stalled, residual " +
                               std::to_string(res.residual));
    return z;
  };

  Vec x(n, 0.0);
  Vec r = b;
  Vec z = precond(r);
  double num = std::sqrt(std::max(0.0, dot(r, z)));
  int iters = 0;
  int cap = 200;

  if (mode == SolveMode::PaperFaithful) {
    // plain Richardson: x <- x + L_H^+ (b - L_G x)
    while (iters < cap) {
      double den = std::sqrt(std::max({dot(x, b), num * num, 1e-300}));
      if (num <= 0.45 * delta * den) break;
      axpy(1.0, z, x);
      Vec gx = mult(x, eps_mult);
      remove_mean(gx);
      for (int i = 0; i < n; ++i) r[i] = b[i] - gx[i];
      z = precond(r);
      num = std::sqrt(std::max(0.0, dot(r, z)));
      ++iters;
    }
  } else {
    // flexible preconditioned CG with L_H^+ as the preconditioner
    Vec p = z, r_prev = r, z_prev = z;
    double rz = dot(r, z);
    while (iters < cap) {
      double den = std::sqrt(std::max({dot(x, b), num * num, 1e-300}));
      if (num <= 0.45 * delta * den) break;
      Vec q = mult(p, eps_mult);
      remove_mean(q);
      double pq = dot(p, q);
      if (!(pq > 0.0)) break;
      double a = rz / pq;
      axpy(a, p, x);
      r_prev = r;
      axpy(-a, q, r);
      z_prev = z;
      z = precond(r);
      // Polak-Ribiere restart-friendly beta for the inexact operator
      double rz2 = dot(r, z);
      double beta = (rz2 - dot(r_prev, z)) / rz;
      if (!(beta > 0.0)) beta = 0.0;
      rz = rz2;
      for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
      num = std::sqrt(std::max(0.0, rz));
      ++iters;
    }
  }
  if (iters >= cap)
    throw std::runtime_error("solve_given_multiplier: no convergence in " + std::to_string(cap) +
                             " iterations");
  if (report) {
    report->iterations = iters;
    double den = std::sqrt(std::max({dot(x, b), num * num, 1e-300}));
    report->error_estimate = den > 0 ? num / den : 0.0;
    Vec gx = mult(x, eps_mult);
    double ri = 0.0;
    for (int i = 0; i < n; ++i) ri = std::max(ri, std::abs(gx[i] - b[i]));
    report->residual_linf = ri;
    report->mode = mode;
    report->wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }
  return x;
}

namespace {

// Instance-dependent multiplicative-Lipschitz order for the built-in families.
double lipschitz_order(const KernelSpec& k, double z_hi, double C) {
  switch (k.family) {
    case KernelFamily::PowerPos: return std::max(1, k.q);
    case KernelFamily::PowerNeg: return std::max(1, k.q);
    case KernelFamily::RationalInv: return 1.0;
    case KernelFamily::PiecewiseExp: return std::max(1.0, std::ceil(k.cutoff));
    case KernelFamily::Gaussian:
      // ratio on [0, z_hi] is at most exp((1-1/C) z_hi / delta) <= C^L
      return std::max(1.0, std::ceil((1.0 - 1.0 / C) * z_hi / (k.delta * std::log(C)) + 1.0));
    default: return -1.0;  // not multiplicatively Lipschitz
  }
}

}  // namespace

Vec klap_solve(const PointSet& P, const KernelSpec& k, const Vec& b, double delta, uint64_t seed,
               const KlapSolveOptions& opts, SolveReport* report) {
  auto t0 = std::chrono::steady_clock::now();
  int n = P.n();
  if (int(b.size()) != n) throw std::invalid_argument("klap_solve: bad vector length");
  std::vector<std::string> declines;

  double eps_h = opts.sparsifier_eps > 0
                     ? opts.sparsifier_eps
                     : (opts.mode == SolveMode::PaperFaithful ? 1.0 / 900.0 : 0.1);

  auto [z_lo, z_hi] = P.sq_dist_range();
  (void)z_lo;

  // sparsifier
  WeightedEdgeList H(n);
  bool have_h = false;
  double L = lipschitz_order(k, z_hi, 2.0);
  if (L > 0) {
    try {
      if (P.dim() <= 3 && std::pow(2.0 * L, P.dim()) <= 1e6) {
        double Llow = lipschitz_order(k, z_hi, 1.0 + 1.0 / std::max(1.0, L));
        H = sparsify_low_dim(P, k, Llow, eps_h, derive_stream(seed, 1), opts.sparsify);
      } else {
        H = sparsify_high_dim(P, k, L, 0, eps_h, derive_stream(seed, 1), opts.sparsify);
      }
      have_h = true;
    } catch (const std::exception& ex) {
      declines.push_back(std::string("sparsifier pipeline: ") + ex.what());
    }
  } else {
    declines.push_back("sparsifier pipeline: kernel not multiplicatively Lipschitz");
  }
  if (!have_h) {
    if (n <= opts.dense_cap) {
      H = kernel_graph(P, k);
    } else {
      std::string msg = "klap_solve: no applicable path;";
      for (auto& d : declines) msg += " " + d + ";";
      msg += " dense fallback refused (n > " + std::to_string(opts.dense_cap) + ")";
      throw std::runtime_error(msg);
    }
  }

  // multiplier
  MultiplierFn mult;
  std::string mult_name;
  Vec degrees = kernel_degrees(P, k);
  double w_min_est = H.w_min();
  if (k.family == KernelFamily::PowerPos &&
      monomial_rank(P.dim(), k.q) <= LowRankFactor::kDefaultRankCap / 4) {
    auto F = std::make_shared<LowRankFactor>(poly_features(P, k.q));
    auto deg = std::make_shared<Vec>(degrees);
    mult = [F, deg](const Vec& x, double) {
      Vec ax = lowrank_adjacency_apply(*F, x);
      Vec out(x.size());
      for (size_t i = 0; i < x.size(); ++i) out[i] = (*deg)[i] * x[i] - ax[i];
      return out;
    };
    mult_name = "lowrank";
  } else if (k.taylor_radius() >= z_hi &&
             [&] {
               // a cheap probe: does a modest degree meet the tail target?
               auto c = k.taylor_coeffs(400);
               if (!c) return false;
               int q = series_degree_for(*c, z_hi, 1e-10, 400);
               return q >= 0 && monomial_rank(P.dim(), q) <= LowRankFactor::kDefaultRankCap / 4;
             }()) {
    auto Pk = std::make_shared<PointSet>(P);
    auto kk = k;
    auto deg = std::make_shared<Vec>(degrees);
    mult = [Pk, kk, deg](const Vec& x, double eps) {
      double s = linf(x);
      if (s == 0.0) return Vec(x.size(), 0.0);
      Vec ax = taylor_adjacency_apply(*Pk, kk, eps, x);
      Vec out(x.size());
      for (size_t i = 0; i < x.size(); ++i) out[i] = (*deg)[i] * x[i] - ax[i];
      return out;
    };
    mult_name = "taylor";
  } else if (k.family == KernelFamily::Gaussian && P.dim() <= 3) {
    auto Pk = std::make_shared<PointSet>(P);
    auto deg = std::make_shared<Vec>(degrees);
    double dlt = k.delta;
    mult = [Pk, deg, dlt, w_min_est](const Vec& x, double eps) {
      double s = linf(x);
      if (s == 0.0) return Vec(x.size(), 0.0);
      double eps_abs = eps * w_min_est * s;
      Vec g = fgt_transform(*Pk, *Pk, x, dlt, eps_abs);
      Vec out(x.size());
      for (size_t i = 0; i < x.size(); ++i) {
        double ax = g[i] - x[i];  // drop the self term exp(0) x_i
        out[i] = (*deg)[i] * x[i] - ax;
      }
      return out;
    };
    mult_name = "fgt";
  } else if (n <= opts.dense_cap) {
    auto Pk = std::make_shared<PointSet>(P);
    auto kk = k;
    mult = [Pk, kk](const Vec& x, double) { return dense_laplacian_apply_omp(*Pk, kk, x); };
    mult_name = "dense";
  } else {
    std::string msg = "klap_solve: no applicable multiplier;";
    msg += " lowrank: kernel not a monomial or rank too large;";
    msg += " taylor: series region or rank unsuitable;";
    msg += " fgt: kernel not Gaussian or d > 3;";
    msg += " dense: n > " + std::to_string(opts.dense_cap);
    throw std::runtime_error(msg);
  }

  SolveReport local;
  Vec x = solve_given_multiplier(mult, H, b, delta, opts.mode, &local);
  local.multiplier = mult_name;
  local.sparsifier_edges = (long long)H.edges.size();
  local.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (report) *report = local;
  return x;
}

}  // namespace kgraph
