#include "kgraph/matvec.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace kgraph {

long long monomial_rank(int d, int q) {
  if (q == 0) return 1;
  // C(2d+2q-1, 2q), overflow-guarded
  long long top = 2LL * d + 2LL * q - 1, k = 2LL * q;
  k = std::min(k, top - k);
  long double acc = 1.0L;
  for (long long i = 1; i <= k; ++i) acc = acc * (top - k + i) / i;
  return (long long)std::llround((double)acc);
}

namespace {

// Enumerates compositions of total into `parts` nonnegative integers.
bool next_composition(std::vector<int>& c, int total) {
  // colex-style successor; returns false after the last composition
  int k = int(c.size());
  if (k == 1) return false;
  int i = 0;
  while (i < k - 1 && c[i] == 0) ++i;
  if (i == k - 1) return false;
  int head = c[i];
  c[i] = 0;
  c[0] = head - 1;
  c[i + 1] += 1;
  (void)total;
  return true;
}

double multinomial(int q, const std::vector<int>& m) {
  // q! / prod m_i!
  double acc = 1.0;
  int used = 0;
  for (int mi : m)
    for (int j = 1; j <= mi; ++j) acc = acc * (++used) / j;
  return acc;
}

double binom(int a, int b) {
  if (b < 0 || b > a) return 0.0;
  b = std::min(b, a - b);
  double acc = 1.0;
  for (int i = 1; i <= b; ++i) acc = acc * (a - b + i) / i;
  return acc;
}

struct Monomial {
  std::vector<int> a;  // u exponents
  std::vector<int> b;  // v exponents
  double coeff;
};

// Expands (sum_i (u_i - v_i)^2)^q into all degree-2q monomials over
// u_1..u_d, v_1..v_d. Monomials with an odd a_i + b_i carry coefficient 0
// but still occupy a slot, keeping rank = C(2d+2q-1, 2q).
std::vector<Monomial> expand_power(int d, int q) {
  std::vector<Monomial> out;
  std::vector<int> e(size_t(2) * d, 0);
  e[0] = 2 * q;
  while (true) {
    Monomial mo;
    mo.a.assign(e.begin(), e.begin() + d);
    mo.b.assign(e.begin() + d, e.end());
    bool even = true;
    for (int i = 0; i < d; ++i)
      if ((mo.a[i] + mo.b[i]) % 2 != 0) even = false;
    if (!even) {
      mo.coeff = 0.0;
    } else {
      std::vector<int> m(d);
      int parity = 0;
      for (int i = 0; i < d; ++i) {
        m[i] = (mo.a[i] + mo.b[i]) / 2;
        parity += mo.b[i];
      }
      double c = multinomial(q, m);
      for (int i = 0; i < d; ++i) c *= binom(2 * m[i], mo.a[i]);
      mo.coeff = (parity % 2 == 0) ? c : -c;
    }
    out.push_back(std::move(mo));
    if (!next_composition(e, 2 * q)) break;
  }
  return out;
}

void fill_factor_block(const PointSet& P, const std::vector<Monomial>& monos, double scale,
                       LowRankFactor& F, int col0) {
  int n = P.n(), d = P.dim();
  int R = F.rank;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    auto x = P.row(i);
    double* lrow = F.left.data() + size_t(i) * R + col0;
    for (size_t t = 0; t < monos.size(); ++t) {
      const auto& mo = monos[t];
      double lv = mo.coeff * scale;
      for (int k = 0; k < d && lv != 0.0; ++k)
        for (int e = 0; e < mo.a[k]; ++e) lv *= x[k];
      lrow[t] = lv;
      double rv = 1.0;
      for (int k = 0; k < d; ++k)
        for (int e = 0; e < mo.b[k]; ++e) rv *= x[k];
      F.right[(size_t(col0) + t) * n + i] = rv;
    }
  }
}

void finish_self_terms(LowRankFactor& F) {
  int n = F.n, R = F.rank;
  F.self_term.assign(n, 0.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int t = 0; t < R; ++t) s += F.left[size_t(i) * R + t] * F.right[size_t(t) * n + i];
    F.self_term[i] = s;
  }
}

}  // namespace

LowRankFactor poly_features(const PointSet& P, int q, long long rank_cap) {
  if (q < 0) throw std::invalid_argument("poly_features: q >= 0 required");
  long long R = monomial_rank(P.dim(), q);
  if (R > rank_cap)
    throw std::runtime_error("poly_features: rank " + std::to_string(R) +
                             " exceeds cap; use the dense path");
  LowRankFactor F;
  F.n = P.n();
  F.rank = int(R);
  F.left.assign(size_t(F.n) * F.rank, 0.0);
  F.right.assign(size_t(F.rank) * F.n, 0.0);
  auto monos = expand_power(P.dim(), q);
  fill_factor_block(P, monos, 1.0, F, 0);
  finish_self_terms(F);
  return F;
}

LowRankFactor poly_series_features(const PointSet& P, const std::vector<double>& coeffs,
                                   long long rank_cap) {
  long long R = 0;
  for (size_t l = 0; l < coeffs.size(); ++l)
    if (coeffs[l] != 0.0) R += monomial_rank(P.dim(), int(l));
  if (R == 0) R = 1;
  if (R > rank_cap)
    throw std::runtime_error("poly_series_features: rank " + std::to_string(R) +
                             " exceeds cap; use the Gaussian-transform or dense path");
  LowRankFactor F;
  F.n = P.n();
  F.rank = int(R);
  F.left.assign(size_t(F.n) * F.rank, 0.0);
  F.right.assign(size_t(F.rank) * F.n, 0.0);
  int col = 0;
  bool any = false;
  for (size_t l = 0; l < coeffs.size(); ++l) {
    if (coeffs[l] == 0.0) continue;
    any = true;
    auto monos = expand_power(P.dim(), int(l));
    fill_factor_block(P, monos, coeffs[l], F, col);
    col += int(monos.size());
  }
  if (!any) {
    // all-zero series: rank-1 zero factor
    std::fill(F.left.begin(), F.left.end(), 0.0);
    std::fill(F.right.begin(), F.right.end(), 0.0);
  }
  finish_self_terms(F);
  return F;
}

Vec lowrank_adjacency_apply(const LowRankFactor& F, const Vec& diag_correction, const Vec& y) {
  if (int(y.size()) != F.n || int(diag_correction.size()) != F.n)
    throw std::invalid_argument("lowrank_adjacency_apply: dimension mismatch");
  int n = F.n, R = F.rank;
  Vec t(R, 0.0);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < R; ++r) {
    const double* row = F.right.data() + size_t(r) * n;
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += row[j] * y[j];
    t[r] = s;
  }
  Vec out(n, 0.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const double* lrow = F.left.data() + size_t(i) * R;
    double s = 0.0;
    for (int r = 0; r < R; ++r) s += lrow[r] * t[r];
    out[i] = s - diag_correction[i] * y[i];
  }
  return out;
}

Vec lowrank_adjacency_apply(const LowRankFactor& F, const Vec& y) {
  return lowrank_adjacency_apply(F, F.self_term, y);
}

int series_degree_for(const std::vector<double>& coeffs, double z_max, double target, int max_deg) {
  int top = std::min<int>(max_deg, int(coeffs.size()) - 1);
  // tail[q] = sum_{l > q} |c_l| z^l
  std::vector<double> term(size_t(top) + 1, 0.0);
  double zp = 1.0;
  for (int l = 0; l <= top; ++l) {
    term[l] = std::abs(coeffs[l]) * zp;
    zp *= z_max;
  }
  double tail = 0.0;
  std::vector<double> tails(size_t(top) + 2, 0.0);
  for (int l = top; l >= 0; --l) {
    tail += term[l];
    tails[l] = tail;
  }
  for (int q = 0; q <= top; ++q)
    if (tails[q + 1] <= target) return q;
  return -1;
}

Vec taylor_adjacency_apply(const PointSet& P, const KernelSpec& k, double eps, const Vec& y,
                           long long rank_cap) {
  auto [z_lo, z_hi] = P.sq_dist_range();
  (void)z_lo;
  if (z_hi > k.taylor_radius())
    throw std::runtime_error("taylor_adjacency_apply: max squared distance " + std::to_string(z_hi) +
                             " outside the series region (" + std::to_string(k.taylor_radius()) + ")");
  int max_deg = 400;
  auto coeffs = k.taylor_coeffs(max_deg);
  if (!coeffs) throw std::runtime_error("taylor_adjacency_apply: kernel has no coefficient stream");
  double target = eps / double(P.n());
  int q = series_degree_for(*coeffs, z_hi, target, max_deg);
  if (q < 0) throw std::runtime_error("taylor_adjacency_apply: no degree meets the tail bound");
  coeffs->resize(size_t(q) + 1);
  auto F = poly_series_features(P, *coeffs, rank_cap);
  return lowrank_adjacency_apply(F, y);
}

Vec adj_from_lap(const LapFamily& lap, int n, const Vec& y, double eps) {
  if (int(y.size()) != n) throw std::invalid_argument("adj_from_lap: bad vector length");
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  int levels = std::max(1, int(std::ceil(std::log2(std::max(2, n)))));
  double sub_eps = 0.5 * eps / levels;

  // Recursion of the halving reduction; idx is the current subset, y the
  // matching sub-vector.
  std::function<Vec(std::span<const int>, const Vec&)> rec =
      [&](std::span<const int> idx, const Vec& yy) -> Vec {
    int m = int(idx.size());
    if (m == 1) return Vec{0.0};
    int h = (m + 1) / 2;  // ceil(m/2) on the left for odd m
    Vec a_left(m, 0.0), a_right(m, 0.0);
    for (int i = 0; i < h; ++i) a_left[i] = yy[i];
    for (int i = h; i < m; ++i) a_right[i] = yy[i];
    Vec z_left = lap(idx, a_left, sub_eps);    // L restricted to idx, applied to left part
    Vec z_right = lap(idx, a_right, sub_eps);  // ... and to the right part
    Vec y1(yy.begin(), yy.begin() + h), y2(yy.begin() + h, yy.end());
    Vec r1 = rec(idx.subspan(0, h), y1);
    Vec r2 = rec(idx.subspan(h), y2);
    Vec out(m, 0.0);
    // cross contributions appear negated in the Laplacian off-diagonal
    for (int i = 0; i < h; ++i) out[i] = r1[i] - z_right[i];
    for (int i = h; i < m; ++i) out[i] = r2[i - h] - z_left[i];
    return out;
  };
  return rec(std::span<const int>(all), y);
}

Vec lap_from_adj(const AdjFamily& adj, int n, const Vec& y, double eps) {
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  Vec ones(n, 1.0);
  Vec g = adj(all, ones, eps * 0.5);
  Vec s = adj(all, y, eps * 0.5);
  Vec out(n);
  for (int i = 0; i < n; ++i) out[i] = g[i] * y[i] - s[i];
  return out;
}

Vec woodbury_lap_solve(const LowRankFactor& F, const Vec& degrees, const Vec& b) {
  int n = F.n, R = F.rank;
  if (int(b.size()) != n || int(degrees.size()) != n)
    throw std::invalid_argument("woodbury_lap_solve: dimension mismatch");

  // L = Diag(degrees) - (left*right - Diag(self)) and we solve
  // (L + (1/n) 11^T) x = b. Absorb the shift into the low-rank part:
  // M = D - U'V' with D = Diag(degrees + self), U' = [left | 1],
  // V' = [right ; -(1/n) 1^T].
  Eigen::VectorXd D(n);
  for (int i = 0; i < n; ++i) {
    D[i] = degrees[i] + F.self_term[i];
    if (!(D[i] > 0.0)) throw std::runtime_error("woodbury_lap_solve: nonpositive diagonal (graph degenerate)");
  }
  Eigen::VectorXd bv(n);
  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += b[i];
  mean /= n;
  for (int i = 0; i < n; ++i) bv[i] = b[i] - mean;

  int K = R + 1;
  Eigen::MatrixXd U(n, K);
  Eigen::MatrixXd V(K, n);
  for (int i = 0; i < n; ++i) {
    for (int r = 0; r < R; ++r) U(i, r) = F.left[size_t(i) * R + r];
    U(i, R) = 1.0;
  }
  for (int r = 0; r < R; ++r)
    for (int j = 0; j < n; ++j) V(r, j) = F.right[size_t(r) * n + j];
  for (int j = 0; j < n; ++j) V(R, j) = -1.0 / n;

  // Woodbury with C = -I: (D - U V)^-1 = D^-1 - D^-1 U (-I + V D^-1 U)^-1 V D^-1
  Eigen::VectorXd Dinv = D.cwiseInverse();
  Eigen::VectorXd t0 = Dinv.cwiseProduct(bv);
  Eigen::MatrixXd DinvU = Dinv.asDiagonal() * U;
  Eigen::MatrixXd inner = V * DinvU;
  inner.diagonal().array() -= 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(inner);
  if (!lu.isInvertible())
    throw std::runtime_error("woodbury_lap_solve: inner system singular (kernel matrix degenerate)");
  Eigen::VectorXd x = t0 - DinvU * lu.solve(V * t0);

  double xmean = x.mean();
  Vec out(n);
  for (int i = 0; i < n; ++i) out[i] = x[i] - xmean;
  return out;
}

}  // namespace kgraph
