#include "kgraph/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kgraph {

std::string KernelSpec::name() const {
  switch (family) {
    case KernelFamily::Gaussian: return "gaussian(delta=" + std::to_string(delta) + ")";
    case KernelFamily::PowerPos: return "power(q=" + std::to_string(q) + ")";
    case KernelFamily::PowerNeg: return "invpower(q=" + std::to_string(q) + ")";
    case KernelFamily::RationalInv: return "rational";
    case KernelFamily::PiecewiseExp: return "piecewise-exp(L=" + std::to_string(cutoff) + ")";
    case KernelFamily::Threshold: return "threshold(t=" + std::to_string(theta) + ")";
    case KernelFamily::NtkRelu: return "ntk";
  }
  return "?";
}

double kernel_eval(const KernelSpec& k, double z) {
  if (z < 0.0) throw std::domain_error("kernel_eval: z < 0");
  switch (k.family) {
    case KernelFamily::Gaussian:
      return std::exp(-z / k.delta);
    case KernelFamily::PowerPos:
      return k.q == 0 ? 1.0 : std::pow(z, k.q);
    case KernelFamily::PowerNeg:
      if (z == 0.0) throw std::domain_error("kernel_eval: z^-q at z=0 (coincident points)");
      return std::pow(z, -k.q);
    case KernelFamily::RationalInv:
      return 1.0 / (1.0 + z);
    case KernelFamily::PiecewiseExp:
      return std::exp(-std::min(z, k.cutoff));
    case KernelFamily::Threshold:
      return z <= k.theta ? 1.0 : 0.0;
    case KernelFamily::NtkRelu: {
      if (z > 4.0 + 1e-12) throw std::domain_error("kernel_eval: NTK kernel needs z in [0,4] (unit-sphere inputs)");
      double t = std::clamp(1.0 - 0.5 * z, -1.0, 1.0);
      return (1.0 / M_PI) * (M_PI - std::acos(t)) * t;
    }
  }
  throw std::logic_error("kernel_eval: unknown family");
}

std::optional<std::vector<double>> KernelSpec::taylor_coeffs(int deg) const {
  std::vector<double> c(size_t(deg) + 1, 0.0);
  switch (family) {
    case KernelFamily::Gaussian: {
      // exp(-z/delta) = sum (-1/delta)^l z^l / l!
      double term = 1.0;
      for (int l = 0; l <= deg; ++l) {
        c[l] = term;
        term *= -1.0 / (delta * (l + 1));
      }
      return c;
    }
    case KernelFamily::PowerPos:
      if (q > deg) return std::nullopt;
      c[q] = 1.0;
      return c;
    case KernelFamily::RationalInv:
      for (int l = 0; l <= deg; ++l) c[l] = (l % 2 == 0) ? 1.0 : -1.0;
      return c;
    default:
      return std::nullopt;
  }
}

double KernelSpec::taylor_radius() const {
  switch (family) {
    case KernelFamily::Gaussian: return std::numeric_limits<double>::infinity();
    case KernelFamily::PowerPos: return std::numeric_limits<double>::infinity();
    case KernelFamily::RationalInv: return 0.5;
    default: return 0.0;
  }
}

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> g;
  g.reserve(count);
  if (lo <= 0.0) throw std::invalid_argument("log_grid: lo must be positive");
  if (count == 1) return {lo};
  double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < count; ++i)
    g.push_back(std::exp(llo + (lhi - llo) * i / (count - 1)));
  return g;
}

LipschitzReport check_mult_lipschitz(const KernelSpec& k, double C, double L,
                                     const std::vector<double>& grid, int c_samples) {
  LipschitzReport rep;
  double envelope = std::pow(C, L);
  // c sampled strictly inside (1/C, C); the endpoint case is the closure of
  // the condition and polynomial kernels sit exactly on it.
  for (double z : grid) {
    if (z <= 0.0) continue;
    double fz = kernel_eval(k, z);
    for (int i = 0; i < c_samples; ++i) {
      double t = (i + 1.0) / (c_samples + 1.0);  // in (0,1)
      double c = std::exp(std::log(1.0 / C) + t * 2.0 * std::log(C));
      double fcz = kernel_eval(k, c * z);
      double ratio;
      if (fz == 0.0 && fcz == 0.0) ratio = 1.0;
      else if (fz == 0.0 || fcz == 0.0) ratio = std::numeric_limits<double>::infinity();
      else ratio = fcz / fz;
      double excess = std::max(ratio / envelope, 1.0 / (ratio * envelope));
      if (excess > rep.worst_ratio) {
        rep.worst_ratio = excess;
        rep.violating_z = z;
        rep.violating_c = c;
      }
      if (ratio >= envelope || ratio <= 1.0 / envelope) rep.ok = false;
    }
  }
  return rep;
}

}  // namespace kgraph
