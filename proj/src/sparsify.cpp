#include "kgraph/sparsify.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "kgraph/cg.hpp"
#include "kgraph/dense_oracles.hpp"
#include "kgraph/exact_reff.hpp"
#include "kgraph/rng.hpp"

namespace kgraph {

LapCsr::LapCsr(const WeightedEdgeList& G) : n(G.n) {
  std::vector<int> cnt(n, 0);
  for (const auto& e : G.edges) {
    ++cnt[e.u];
    ++cnt[e.v];
  }
  ptr.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) ptr[i + 1] = ptr[i] + cnt[i];
  idx.resize(ptr[n]);
  val.resize(ptr[n]);
  diag.assign(n, 0.0);
  std::vector<int> at(ptr.begin(), ptr.end() - 1);
  for (const auto& e : G.edges) {
    idx[at[e.u]] = e.v;
    val[at[e.u]++] = e.w;
    idx[at[e.v]] = e.u;
    val[at[e.v]++] = e.w;
    diag[e.u] += e.w;
    diag[e.v] += e.w;
  }
}

void LapCsr::apply(const Vec& x, Vec& out) const {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    double s = diag[i] * x[i];
    for (int t = ptr[i]; t < ptr[i + 1]; ++t) s -= val[t] * x[idx[t]];
    out[i] = s;
  }
}

CgResult lap_cg_solve(const LapCsr& L, const Vec& b, Vec& x, double tol, int max_iter) {
  int n = L.n;
  Vec r = b;
  remove_mean(r);
  double bnorm = std::sqrt(dot(r, r));
  x.assign(n, 0.0);
  if (bnorm == 0.0) return {true, 0, 0.0};

  Vec z(n), p(n), q(n);
  auto precond = [&](const Vec& rr, Vec& zz) {
    for (int i = 0; i < n; ++i) zz[i] = rr[i] / std::max(L.diag[i], 1e-300);
    remove_mean(zz);
  };
  precond(r, z);
  p = z;
  double rz = dot(r, z);
  CgResult res;
  for (int it = 0; it < max_iter; ++it) {
    L.apply(p, q);
    double pq = dot(p, q);
    if (pq <= 0.0) break;
    double alpha = rz / pq;
    axpy(alpha, p, x);
    axpy(-alpha, q, r);
    if ((it & 31) == 31) remove_mean(r);
    double rn = std::sqrt(dot(r, r));
    res.iterations = it + 1;
    if (rn <= tol * bnorm) {
      res.converged = true;
      break;
    }
    precond(r, z);
    double rz2 = dot(r, z);
    double beta = rz2 / rz;
    rz = rz2;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  remove_mean(x);
  // residual against the projected right-hand side (the mean component is
  // outside the Laplacian's range)
  Vec chk(n);
  L.apply(x, chk);
  Vec bp = b;
  remove_mean(bp);
  double ri = 0.0;
  for (int i = 0; i < n; ++i) ri = std::max(ri, std::abs(chk[i] - bp[i]));
  res.residual = ri;
  return res;
}

namespace {

// Inverse-CDF draw from fixed weights; deterministic across platforms.
struct WeightedSampler {
  std::vector<double> cum;
  explicit WeightedSampler(const std::vector<double>& w) {
    cum.resize(w.size());
    double acc = 0.0;
    for (size_t i = 0; i < w.size(); ++i) {
      acc += w[i];
      cum[i] = acc;
    }
  }
  double total() const { return cum.empty() ? 0.0 : cum.back(); }
  size_t draw(Rng& rng) const {
    double u = rng.uniform() * total();
    return std::lower_bound(cum.begin(), cum.end(), u) - cum.begin();
  }
};

long long oversample_count(double C, double eps, double t, double delta) {
  double lt = std::log(std::max(t, 1.0));
  if (lt < 1.0) lt = 1.0;
  double q = C / (eps * eps) * t * lt * std::log(1.0 / delta);
  return std::max(1LL, (long long)std::ceil(q));
}

}  // namespace

WeightedEdgeList oversample(const WeightedEdgeList& G, const LeverageOverestimates& p, double eps,
                            double delta, uint64_t seed, double C) {
  if (G.edges.empty()) throw std::invalid_argument("oversample: empty graph");
  if (p.p.size() != G.edges.size()) throw std::invalid_argument("oversample: probability size mismatch");
  double t = p.total();
  if (!(t > 0.0)) throw std::invalid_argument("oversample: t must be positive");
  for (double v : p.p)
    if (!(v > 0.0) || v > 1.0 + 1e-12)
      throw std::invalid_argument("oversample: p_e must lie in (0,1]");

  long long q = oversample_count(C, eps, t, delta);
  WeightedSampler sampler(p.p);
  Rng rng(seed);
  WeightedEdgeList H(G.n);
  H.edges.reserve(std::min<long long>(q, (long long)G.edges.size() * 2));
  for (long long i = 0; i < q; ++i) {
    size_t e = sampler.draw(rng);
    const auto& ed = G.edges[e];
    H.add(ed.u, ed.v, ed.w * t / (p.p[e] * double(q)));
  }
  H.merge_duplicates();
  return H;
}

ReffSketch reff_sketch_build(const WeightedEdgeList& G, double eps, uint64_t seed, int rows,
                             double cg_tol, int cg_max_iter) {
  G.require_connected("reff_sketch_build");
  int n = G.n;
  int m = int(G.edges.size());
  if (rows <= 0) rows = int(std::ceil(24.0 * std::log(double(n)) / (eps * eps)));
  ReffSketch S;
  S.n = n;
  S.rows = rows;
  S.Z.assign(size_t(rows) * n, 0.0);
  LapCsr L(G);

  std::vector<std::string> failures;
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < rows; ++r) {
    // y = B^T W^{1/2} pi_r with pi_r a +-1/sqrt(rows) row
    Rng rng(derive_stream(seed, r));
    Vec y(n, 0.0);
    double scale = 1.0 / std::sqrt(double(rows));
    for (int e = 0; e < m; ++e) {
      double s = rng.sign() * scale * std::sqrt(G.edges[e].w);
      y[G.edges[e].u] += s;
      y[G.edges[e].v] -= s;
    }
    Vec z;
    CgResult res = lap_cg_solve(L, y, z, cg_tol, cg_max_iter);
    if (!res.converged) {
#pragma omp critical
      failures.push_back("row " + std::to_string(r) + " residual " + std::to_string(res.residual));
    }
    for (int i = 0; i < n; ++i) S.Z[size_t(r) * n + i] = z[i];
  }
  if (!failures.empty())
    throw std::runtime_error("reff_sketch_build: solver did not converge (" + failures.front() + ")");
  return S;
}

WeightedEdgeList ss_resparsify(const WeightedEdgeList& G_in, double eps, uint64_t seed,
                               const SparsifyConfig& cfg) {
  WeightedEdgeList G = G_in;
  G.merge_duplicates();
  long long budget =
      (long long)std::ceil(cfg.c_ss * G.n * std::log(std::max(3.0, double(G.n))) / (eps * eps));
  if ((long long)G.edges.size() <= budget) return G;

  ReffSketch sk = reff_sketch_build(G, 0.5, derive_stream(seed, 0x5151), cfg.sketch_rows,
                                    std::max(cfg.cg_tol, 1e-6), cfg.cg_max_iter);
  std::vector<double> lev(G.edges.size());
  for (size_t e = 0; e < G.edges.size(); ++e) {
    const auto& ed = G.edges[e];
    lev[e] = std::max(1e-300, cfg.sketch_safety * ed.w * sk.estimate(ed.u, ed.v));
  }
  double t = 0.0;
  for (double v : lev) t += v;
  WeightedSampler sampler(lev);
  Rng rng(derive_stream(seed, 0xA1A1));
  WeightedEdgeList H(G.n);
  H.edges.reserve(budget);
  for (long long i = 0; i < budget; ++i) {
    size_t e = sampler.draw(rng);
    const auto& ed = G.edges[e];
    H.add(ed.u, ed.v, ed.w * t / (lev[e] * double(budget)));
  }
  H.merge_duplicates();
  return H;
}

SpectralCheckResult spectral_check(const WeightedEdgeList& G, const WeightedEdgeList& H, double eps) {
  if (G.n != H.n) throw std::invalid_argument("spectral_check: vertex count mismatch");
  G.require_connected("spectral_check");
  int n = G.n;
  Eigen::MatrixXd LG = dense_laplacian_matrix(G);
  Eigen::MatrixXd LH = dense_laplacian_matrix(H);

  // orthonormal basis of the complement of ones
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(n, 1);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(ones);
  Eigen::MatrixXd Qfull = qr.householderQ();
  Eigen::MatrixXd Q = Qfull.rightCols(n - 1);

  Eigen::MatrixXd A = Q.transpose() * LG * Q;  // PD for connected G
  Eigen::MatrixXd B = Q.transpose() * LH * Q;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(B, A, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("spectral_check: eigensolver failed");
  double lo = es.eigenvalues().minCoeff();
  double hi = es.eigenvalues().maxCoeff();
  return {lo >= 1.0 - eps && hi <= 1.0 + eps, lo, hi};
}

namespace {

struct PairSampleStats {
  long long take_all = 0, sampled = 0;
};

// Uniform biclique sampling for one WSPD pair; weights carry the true kernel
// value from the original coordinates, scaled by |A||B|/s.
void sample_biclique(const PointSet& P, const KernelSpec& k, std::span<const int> A,
                     std::span<const int> B, double z_lo, double z_hi, double eps, double c0,
                     uint64_t stream_seed, std::vector<Edge>& out, PairSampleStats& stats) {
  double rho;
  {
    // measured weight ratio over the biclique's squared-distance interval
    double fmin = std::numeric_limits<double>::infinity(), fmax = 0.0;
    auto grid = log_grid(std::max(z_lo, 1e-300), std::max(z_hi, 1e-300), 16);
    for (double z : grid) {
      double f = kernel_eval(k, z);
      fmin = std::min(fmin, f);
      fmax = std::max(fmax, f);
    }
    rho = (fmin > 0.0) ? fmax / fmin : std::numeric_limits<double>::infinity();
  }
  long long na = (long long)A.size(), nb = (long long)B.size();
  long long all = na * nb;
  double sz = double(na + nb);
  long long s = (long long)std::ceil(c0 / (eps * eps) * rho * sz * std::log(sz + 1.0));
  if (s >= all || !(rho < std::numeric_limits<double>::infinity())) {
    ++stats.take_all;
    for (int u : A)
      for (int v : B) {
        double w = kernel_eval(k, P.sq_dist(u, v));
        if (w > 0.0) out.push_back({std::min(u, v), std::max(u, v), w});
      }
    return;
  }
  ++stats.sampled;
  Rng rng(stream_seed);
  double scale = double(all) / double(s);
  for (long long i = 0; i < s; ++i) {
    int u = A[rng.below(na)];
    int v = B[rng.below(nb)];
    double w = kernel_eval(k, P.sq_dist(u, v));
    if (w > 0.0) out.push_back({std::min(u, v), std::max(u, v), w * scale});
  }
}

WeightedEdgeList union_from_wspd(const PointSet& P, const KernelSpec& k, const Wspd& wspd,
                                 double sq_slack, double eps, uint64_t seed,
                                 const SparsifyConfig& cfg) {
  int npairs = int(wspd.pairs().size());
  std::vector<std::vector<Edge>> buf(npairs);
  PairSampleStats stats;
#pragma omp parallel for schedule(dynamic, 16)
  for (int i = 0; i < npairs; ++i) {
    const auto& pr = wspd.pairs()[i];
    auto A = wspd.side_a(pr);
    auto B = wspd.side_b(pr);
    double lo = pr.box_dist, hi = pr.box_dist * pr.ratio_cert;
    // squared-distance interval in the original space; sq_slack absorbs the
    // projection distortion (1 for the unprojected pipeline)
    double z_lo = lo * lo / sq_slack;
    double z_hi = hi * hi * sq_slack;
    PairSampleStats local;
    sample_biclique(P, k, A, B, z_lo, z_hi, eps, cfg.c_biclique, derive_stream(seed, i), buf[i],
                    local);
#pragma omp critical
    {
      stats.take_all += local.take_all;
      stats.sampled += local.sampled;
    }
  }
  WeightedEdgeList H(P.n());
  size_t total = 0;
  for (const auto& b : buf) total += b.size();
  H.edges.reserve(total);
  for (const auto& b : buf) H.edges.insert(H.edges.end(), b.begin(), b.end());
  H.merge_duplicates();
  return H;
}

Wspd project_and_decompose(const PointSet& P, int k_proj, double eps_sep, uint64_t seed,
                           PointSet& projected) {
  for (int attempt = 0; attempt < 4; ++attempt) {
    projected = jl_project(P, k_proj, derive_stream(seed, 0x11 + attempt));
    try {
      return build_wspd(projected, eps_sep);
    } catch (const std::runtime_error&) {
      // projection collision; redraw
    }
  }
  throw std::runtime_error("sparsify: projected points kept colliding; input may contain duplicates");
}

}  // namespace

WeightedEdgeList sparsify_high_dim(const PointSet& P, const KernelSpec& k, double L, int k_proj,
                                   double eps, uint64_t seed, const SparsifyConfig& cfg) {
  int n = P.n();
  if (n < 2) throw std::invalid_argument("sparsify_high_dim: n >= 2 required");
  if (n == 2) {
    WeightedEdgeList H(2);
    H.add(0, 1, kernel_eval(k, P.sq_dist(0, 1)));
    return H;
  }

  // certify (2,L)-multiplicative Lipschitzness on the instance's range
  {
    double z_hi = 0.0;
    {
      std::vector<double> lo(P.dim(), std::numeric_limits<double>::infinity());
      std::vector<double> hi(P.dim(), -std::numeric_limits<double>::infinity());
      for (int i = 0; i < n; ++i) {
        auto x = P.row(i);
        for (int a = 0; a < P.dim(); ++a) {
          lo[a] = std::min(lo[a], x[a]);
          hi[a] = std::max(hi[a], x[a]);
        }
      }
      for (int a = 0; a < P.dim(); ++a) z_hi += (hi[a] - lo[a]) * (hi[a] - lo[a]);
    }
    double z_lo = z_hi;
    Rng rng(derive_stream(seed, 0xCE57));
    int probes = std::min<long long>(200000, (long long)n * (n - 1) / 2);
    for (int i = 0; i < probes; ++i) {
      int a = int(rng.below(n)), b = int(rng.below(n));
      if (a == b) continue;
      z_lo = std::min(z_lo, P.sq_dist(a, b));
    }
    auto rep = check_mult_lipschitz(k, 2.0, L, log_grid(std::max(z_lo / 4.0, z_hi * 1e-15), z_hi, 64));
    if (!rep.ok)
      throw std::runtime_error("sparsify_high_dim: kernel failed (2," + std::to_string(L) +
                               ")-Lipschitz certification near z = " + std::to_string(rep.violating_z));
  }

  if (k_proj <= 0) k_proj = int(std::ceil(std::sqrt(L * std::log(double(n)))));
  PointSet projected;
  Wspd wspd = project_and_decompose(P, k_proj, 0.5, seed, projected);
  WeightedEdgeList U = union_from_wspd(P, k, wspd, cfg.jl_sq_slack, eps, derive_stream(seed, 0xB1), cfg);
  U.require_connected("sparsify_high_dim (biclique union)");
  return ss_resparsify(U, eps, derive_stream(seed, 0xF1), cfg);
}

WeightedEdgeList sparsify_low_dim(const PointSet& P, const KernelSpec& k, double L, double eps,
                                  uint64_t seed, const SparsifyConfig& cfg) {
  int n = P.n();
  if (n < 2) throw std::invalid_argument("sparsify_low_dim: n >= 2 required");
  if (n == 2) {
    WeightedEdgeList H(2);
    H.add(0, 1, kernel_eval(k, P.sq_dist(0, 1)));
    return H;
  }
  {
    auto [z_lo, z_hi] = P.sq_dist_range();
    double C = 1.0 + 1.0 / L;
    auto rep = check_mult_lipschitz(k, C, L, log_grid(std::max(z_lo / 2.0, 1e-300), z_hi * 2.0, 64));
    if (!rep.ok)
      throw std::runtime_error("sparsify_low_dim: kernel failed (1+1/L," + std::to_string(L) +
                               ")-Lipschitz certification near z = " + std::to_string(rep.violating_z));
  }
  double eps_sep = std::min(0.9, 1.0 / L);
  Wspd wspd = build_wspd(P, eps_sep);
  WeightedEdgeList U = union_from_wspd(P, k, wspd, 1.0, eps, derive_stream(seed, 0xB2), cfg);
  U.require_connected("sparsify_low_dim (biclique union)");
  return ss_resparsify(U, eps, derive_stream(seed, 0xF2), cfg);
}

}  // namespace kgraph
