#pragma once

#include <string>

namespace nlplap {

// Radial interaction kernels on the line, truncated at a finite horizon.
//
// A kernel k carries the integrability exponent p of the energy it will be
// used in, the strength c0, the horizon delta, and a fractional order s that
// calibrates the singularity (for the fractional family) and the lower-bound
// hypothesis checked by validate_kernel. Interactions beyond the horizon
// vanish identically.
enum class KernelFamily {
  // k(r) = c0 * r^{-(1 + (s-1)p)} for r <= delta, 0 beyond.
  TruncatedFractional,
  // k(r) = c0 for r <= delta, 0 beyond. Keeps s as a bound parameter only.
  TruncatedConstant,
};

struct Kernel {
  KernelFamily family = KernelFamily::TruncatedFractional;
  double p = 2.0;     // energy exponent, p > 1
  double s = 0.5;     // fractional order, 0 < s < 1
  double c0 = 1.0;    // strength, c0 > 0
  double delta = 0.5; // horizon, delta > 0

  static constexpr int dim = 1;

  static Kernel truncated_fractional(double p, double s, double c0, double delta);
  static Kernel truncated_constant(double p, double s, double c0, double delta);

  // p' with 1/p + 1/p' = 1.
  double conjugate() const { return p / (p - 1.0); }
  // N + (s-1)p, the exponent of the singular comparison kernel.
  double singular_exponent() const { return dim + (s - 1.0) * p; }

  std::string family_name() const;
};

// Throws std::invalid_argument when parameters leave the admissible ranges
// (p > 1, 0 < s < 1, c0 > 0, delta > 0).
void check_kernel_params(const Kernel& k);

// k(r). Throws std::domain_error for r <= 0; returns 0 beyond the horizon.
double eval_kernel(const Kernel& k, double r);

// k(r) / r^p, the weight every pair integral carries. Same domain rules.
double combined_weight(const Kernel& k, double r);

// Numeric check of the standing kernel hypotheses:
//  - tail integrability: int_{|z| > eps} k(|z|)/|z|^p dz finite,
//  - pointwise lower bound: k(r) >= c0 * r^{-(N + (s-1)p)} on (0, delta],
//    probed as min over sampled radii of k(r) r^{N+(s-1)p} / c0,
//  - k integrable on the line.
// Integrals use adaptive Gauss-Kronrod quadrature at relative tolerance 1e-8;
// "finite" means the adaptive estimate converged.
struct KernelValidationReport {
  double epsilon = 0.0;
  int samples = 0;
  double tail_integral = 0.0;
  bool tail_finite = false;
  double lower_bound_min_ratio = 0.0;
  bool lower_bound_pass = false;
  double l1_integral = 0.0;
  bool l1_finite = false;
  bool degenerate = false; // eps >= delta: every check is vacuous

  bool all_pass() const {
    return !degenerate && tail_finite && lower_bound_pass && l1_finite;
  }
  std::string to_json(const Kernel& k) const;
};

KernelValidationReport validate_kernel(const Kernel& k, double epsilon, int samples);

}  // namespace nlplap
