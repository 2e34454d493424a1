#pragma once

#include <optional>
#include <string>
#include <vector>

namespace kgraph {

// Built-in kernel families f: R>=0 -> R>=0, applied as K(u,v) = f(||u-v||^2).
enum class KernelFamily {
  Gaussian,      // exp(-z/delta)
  PowerPos,      // z^q, integer q >= 0
  PowerNeg,      // z^-q, integer q >= 1, singular at 0
  RationalInv,   // 1/(1+z)
  PiecewiseExp,  // exp(-z) for z <= cutoff, exp(-cutoff) beyond
  Threshold,     // 1 if z <= theta else 0
  NtkRelu,       // (1/pi)(pi - acos(1-z/2))(1-z/2), unit-sphere inputs (z in [0,4])
};

struct KernelSpec {
  KernelFamily family = KernelFamily::Gaussian;
  double delta = 1.0;   // Gaussian width
  int q = 1;            // Power exponent
  double cutoff = 1.0;  // PiecewiseExp cutoff
  double theta = 1.0;   // Threshold radius

  static KernelSpec gaussian(double delta) { return {KernelFamily::Gaussian, delta, 0, 0, 0}; }
  static KernelSpec power_pos(int q) { return {KernelFamily::PowerPos, 0, q, 0, 0}; }
  static KernelSpec power_neg(int q) { return {KernelFamily::PowerNeg, 0, q, 0, 0}; }
  static KernelSpec rational_inv() { return {KernelFamily::RationalInv, 0, 0, 0, 0}; }
  static KernelSpec piecewise_exp(double cutoff) { return {KernelFamily::PiecewiseExp, 0, 0, cutoff, 0}; }
  static KernelSpec threshold(double theta) { return {KernelFamily::Threshold, 0, 0, 0, theta}; }
  static KernelSpec ntk_relu() { return {KernelFamily::NtkRelu, 0, 0, 0, 0}; }

  bool singular_at_zero() const { return family == KernelFamily::PowerNeg; }
  std::string name() const;

  // Coefficients c_0..c_deg of the Maclaurin series f(z) = sum c_l z^l, for
  // the families that carry one (Gaussian, PowerPos, RationalInv). Families
  // without a stored series return nullopt.
  std::optional<std::vector<double>> taylor_coeffs(int deg) const;

  // Largest z on which the stored series is usable (tail bounds valid).
  // RationalInv requires z <= 1/2; Gaussian and PowerPos converge everywhere.
  double taylor_radius() const;
};

// f(z) for the named family. Domain errors: z < 0; z == 0 for PowerNeg;
// z > 4 for NtkRelu.
double kernel_eval(const KernelSpec& k, double z);

struct LipschitzReport {
  bool ok = true;
  double worst_ratio = 1.0;  // ratio of f(cz)/f(z) versus the C^L envelope, max over grid
  double violating_z = 0.0;
  double violating_c = 0.0;
};

// Numerically checks the (C,L)-multiplicative-Lipschitz condition
// C^-L < f(cz)/f(z) < C^L on the given z grid, with c sampled inside the
// open interval (1/C, C). Reports, never throws.
LipschitzReport check_mult_lipschitz(const KernelSpec& k, double C, double L,
                                     const std::vector<double>& grid, int c_samples = 33);

// Log-spaced grid with `count` points covering [lo, hi].
std::vector<double> log_grid(double lo, double hi, int count);

}  // namespace kgraph
