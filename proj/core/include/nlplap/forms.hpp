#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nlplap/coefficients.hpp"
#include "nlplap/mesh.hpp"
#include "nlplap/quadrature.hpp"

namespace nlplap {

// |d|^{p-2} d, the odd power carrying weak forms and fluxes. Zero at d = 0
// for every p > 1.
inline double odd_power(double d, double p) {
  if (d == 0.0) return 0.0;
  if (p == 2.0) return d;
  if (p == 3.0) return std::fabs(d) * d;
  return std::copysign(std::pow(std::fabs(d), p - 1.0), d);
}

// |d|^p.
inline double abs_power(double d, double p) {
  double a = std::fabs(d);
  if (p == 2.0) return a * a;
  if (p == 3.0) return a * a * a;
  return std::pow(a, p);
}

// Right-hand side functional on the dual side of the constrained space.
// A density g pairs by the lumped node rule over interior nodes,
// <f, v> = sum_i spacing * g_i * v_i; explicit node weights pair directly.
// Either way the pairing vanishes on functions supported in the collar.
class Functional {
 public:
  static Functional density(MeshPtr mesh, double constant_value);
  static Functional density(MeshPtr mesh, std::vector<double> node_values);
  static Functional node_weights(MeshPtr mesh, std::vector<double> interior_weights);

  const MeshPtr& mesh() const { return mesh_; }
  double pair_with(const DiscreteFunction& v) const;
  // <f, phi_i> for every node i (zero off the interior).
  const std::vector<double>& hat_coefficients() const { return hat_coeffs_; }

 private:
  MeshPtr mesh_;
  std::vector<double> hat_coeffs_;
};

// Function on the quadrature's pair set, one value per entry. Fields made by
// nonlocal_gradient and flux are antisymmetric: the value on a mirror entry
// is exactly the negative.
class PairField {
 public:
  PairField(QuadraturePtr quad, std::vector<double> values, bool antisymmetric);
  static PairField antisymmetric_from_upper(QuadraturePtr quad,
                                            const std::function<double(std::size_t)>& upper_value);

  const QuadraturePtr& quad() const { return quad_; }
  const std::vector<double>& values() const { return values_; }
  double value(std::size_t e) const { return values_[e]; }
  bool antisymmetric() const { return antisymmetric_; }
  // True when value(mirror(e)) == -value(e) holds exactly for every entry.
  bool antisymmetry_holds() const;

  void dump_csv(std::ostream& os) const;  // x, x_prime, value

 private:
  QuadraturePtr quad_;
  std::vector<double> values_;
  bool antisymmetric_;
};

// Unweighted nonlocal energy: sum of w_e |u(x') - u(x)|^p over all entries.
double energy_B(const NonlocalQuadrature& quad, const DiscreteFunction& u);

// Coefficient-weighted form B_h(u, v) with the difference nonlinearity in u.
// Bilinear only at p = 2. h_on_entries, when given, must be values_on(quad).
double form_Bh(const NonlocalQuadrature& quad, const CoefficientField& h,
               const DiscreteFunction& u, const DiscreteFunction& v);
double form_Bh(const NonlocalQuadrature& quad, std::span<const double> h_on_entries,
               const DiscreteFunction& u, const DiscreteFunction& v);

// Dirichlet objective J_h(w) = (1/p) B_h(w, w) - <f, w>. w must satisfy the
// collar constraint.
double objective_J(const NonlocalQuadrature& quad, const CoefficientField& h,
                   const Functional& f, const DiscreteFunction& w);
double objective_J(const NonlocalQuadrature& quad, std::span<const double> h_on_entries,
                   const Functional& f, const DiscreteFunction& w);

// Gradient of J_h in the interior node values: component i equals
// B_h(u, phi_i) - <f, phi_i>. Length mesh->n_interior().
std::vector<double> residual(const NonlocalQuadrature& quad, const CoefficientField& h,
                             const Functional& f, const DiscreteFunction& u);
std::vector<double> residual(const NonlocalQuadrature& quad, std::span<const double> h_on_entries,
                             const Functional& f, const DiscreteFunction& u);

// Nonlocal gradient D u = k^{1/p}(r) (u(x') - u(x)) / r as a pair field.
PairField nonlocal_gradient(const QuadraturePtr& quad, const DiscreteFunction& u);

// Two-point flux h k^{1/p'}(r) |u(x')-u(x)|^{p-2} (u(x')-u(x)) / r^{p-1}.
PairField flux(const QuadraturePtr& quad, const CoefficientField& h,
               const DiscreteFunction& u);
PairField flux(const QuadraturePtr& quad, std::span<const double> h_on_entries,
               const DiscreteFunction& u);

// Pairing of two fields over the entry set: sum g_e a_e b_e. With a = flux
// and b = nonlocal gradient this reproduces B_h(u, v).
double pair_fields(const PairField& a, const PairField& b);

// Nonlocal divergence of an antisymmetric pair field, represented against
// the nodal hats: component i approximates
//   int k^{1/p}(r) (psi(x, x') - psi(x', x)) / r  phi_i(x) dx' dx.
// Both algebraic forms are offered; they agree by antisymmetry.
enum class DivergenceForm { Difference, MinusTwo };
std::vector<double> nonlocal_divergence(const PairField& psi,
                                        DivergenceForm form = DivergenceForm::Difference);

// Integration by parts: lhs = nodal pairing of the divergence with v,
// rhs = sum of bare weights psi * Dv. The gap is |lhs - rhs|.
struct IntegrationByParts {
  double lhs;
  double rhs;
  double gap;
};
IntegrationByParts integration_by_parts_gap(const PairField& psi, const DiscreteFunction& v);

// Pairing of a pair field with a two-point test function G(x', x) over the
// entry set, using the bare geometry weights.
double flux_pairing(const PairField& psi, const std::function<double(double, double)>& G);

// Sample check of the elementary p-monotonicity inequalities on [-10, 10]^2:
//   pairing     (|a|^{p-2}a - |b|^{p-2}b)(a - b) >= 0,
//   p >= 2      pairing >= 2^{2-p} |a - b|^p,
//   sandwich    c (|a|+|b|)^{p-2} |a-b|^2 <= pairing <= C (...),
// with empirical c, C reported, not asserted.
struct MonotonicityReport {
  double p = 0.0;
  std::int64_t samples = 0;
  std::int64_t pairing_violations = 0;
  std::int64_t lower_bound_violations = 0;  // only meaningful for p >= 2
  double c_empirical = 0.0;
  double C_empirical = 0.0;
  bool pass() const { return pairing_violations == 0 && lower_bound_violations == 0; }
  std::string to_json() const;
};
MonotonicityReport monotonicity_check(double p, std::int64_t samples);

}  // namespace nlplap
