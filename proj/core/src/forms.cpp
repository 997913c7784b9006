#include "nlplap/forms.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "nlplap/summation.hpp"

namespace nlplap {

namespace {

void require_same_mesh(const NonlocalQuadrature& quad, const DiscreteFunction& u,
                       const char* who) {
  if (u.mesh().get() != quad.mesh.get())
    throw std::invalid_argument(std::string(who) + ": function mesh does not match quadrature");
}

// 53-bit draw in [0, 1); the generator is fully specified by the standard,
// so the stream is identical on every platform.
double unit_draw(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

Functional Functional::density(MeshPtr mesh, double constant_value) {
  if (!mesh) throw std::invalid_argument("Functional::density: null mesh");
  std::vector<double> v(static_cast<std::size_t>(mesh->n_nodes()), constant_value);
  return density(std::move(mesh), std::move(v));
}

Functional Functional::density(MeshPtr mesh, std::vector<double> node_values) {
  if (!mesh) throw std::invalid_argument("Functional::density: null mesh");
  if (static_cast<int>(node_values.size()) != mesh->n_nodes())
    throw std::invalid_argument("Functional::density: node value count does not match mesh");
  Functional f;
  f.mesh_ = std::move(mesh);
  f.hat_coeffs_.assign(node_values.size(), 0.0);
  for (int i = 0; i < f.mesh_->n_nodes(); ++i)
    if (f.mesh_->is_interior_node(i))
      f.hat_coeffs_[static_cast<std::size_t>(i)] =
          f.mesh_->spacing * node_values[static_cast<std::size_t>(i)];
  return f;
}

Functional Functional::node_weights(MeshPtr mesh, std::vector<double> interior_weights) {
  if (!mesh) throw std::invalid_argument("Functional::node_weights: null mesh");
  if (static_cast<int>(interior_weights.size()) != mesh->n_interior())
    throw std::invalid_argument("Functional::node_weights: weight count does not match mesh");
  Functional f;
  f.mesh_ = std::move(mesh);
  f.hat_coeffs_.assign(static_cast<std::size_t>(f.mesh_->n_nodes()), 0.0);
  int fi = f.mesh_->first_interior();
  for (int i = 0; i < f.mesh_->n_interior(); ++i)
    f.hat_coeffs_[static_cast<std::size_t>(fi + i)] = interior_weights[static_cast<std::size_t>(i)];
  return f;
}

double Functional::pair_with(const DiscreteFunction& v) const {
  if (v.mesh().get() != mesh_.get())
    throw std::invalid_argument("Functional::pair_with: mesh mismatch");
  KahanSum acc;
  for (std::size_t i = 0; i < hat_coeffs_.size(); ++i) acc.add(hat_coeffs_[i] * v.values()[i]);
  return acc.value();
}

PairField::PairField(QuadraturePtr quad, std::vector<double> values, bool antisymmetric)
    : quad_(std::move(quad)), values_(std::move(values)), antisymmetric_(antisymmetric) {
  if (!quad_) throw std::invalid_argument("PairField: null quadrature");
  if (values_.size() != quad_->size())
    throw std::invalid_argument("PairField: value count does not match quadrature");
}

PairField PairField::antisymmetric_from_upper(
    QuadraturePtr quad, const std::function<double(std::size_t)>& upper_value) {
  if (!quad) throw std::invalid_argument("PairField: null quadrature");
  std::vector<double> v(quad->size());
  for (std::size_t e = 0; e < v.size(); e += 2) {
    double val = upper_value(e);
    v[e] = val;
    v[e + 1] = -val;
  }
  return PairField(std::move(quad), std::move(v), true);
}

bool PairField::antisymmetry_holds() const {
  for (std::size_t e = 0; e < values_.size(); e += 2)
    if (values_[e + 1] != -values_[e]) return false;
  return true;
}

void PairField::dump_csv(std::ostream& os) const {
  os << "x,x_prime,value\n";
  char line[128];
  for (std::size_t e = 0; e < values_.size(); ++e) {
    std::snprintf(line, sizeof line, "%.17e,%.17e,%.17e\n", quad_->point_x(e),
                  quad_->point_xp(e), values_[e]);
    os << line;
  }
}

double energy_B(const NonlocalQuadrature& quad, const DiscreteFunction& u) {
  require_same_mesh(quad, u, "energy_B");
  const std::vector<double>& uv = u.values();
  double p = quad.kernel.p;
  KahanSum acc;
  for (std::size_t e = 0; e < quad.size(); ++e) {
    double d = quad.interpolate_xp(uv, e) - quad.interpolate_x(uv, e);
    acc.add(quad.weight[e] * abs_power(d, p));
  }
  return acc.value();
}

double form_Bh(const NonlocalQuadrature& quad, std::span<const double> h_on_entries,
               const DiscreteFunction& u, const DiscreteFunction& v) {
  require_same_mesh(quad, u, "form_Bh");
  require_same_mesh(quad, v, "form_Bh");
  if (h_on_entries.size() != quad.size())
    throw std::invalid_argument("form_Bh: coefficient entry count mismatch");
  const std::vector<double>& uv = u.values();
  const std::vector<double>& vv = v.values();
  double p = quad.kernel.p;
  KahanSum acc;
  for (std::size_t e = 0; e < quad.size(); ++e) {
    double du = quad.interpolate_xp(uv, e) - quad.interpolate_x(uv, e);
    double dv = quad.interpolate_xp(vv, e) - quad.interpolate_x(vv, e);
    acc.add(quad.weight[e] * h_on_entries[e] * odd_power(du, p) * dv);
  }
  return acc.value();
}

double form_Bh(const NonlocalQuadrature& quad, const CoefficientField& h,
               const DiscreteFunction& u, const DiscreteFunction& v) {
  std::vector<double> hv = h.values_on(quad);
  return form_Bh(quad, hv, u, v);
}

double objective_J(const NonlocalQuadrature& quad, std::span<const double> h_on_entries,
                   const Functional& f, const DiscreteFunction& w) {
  if (!w.in_constrained_space())
    throw std::invalid_argument("objective_J: w violates the collar constraint");
  return form_Bh(quad, h_on_entries, w, w) / quad.kernel.p - f.pair_with(w);
}

double objective_J(const NonlocalQuadrature& quad, const CoefficientField& h,
                   const Functional& f, const DiscreteFunction& w) {
  std::vector<double> hv = h.values_on(quad);
  return objective_J(quad, hv, f, w);
}

std::vector<double> residual(const NonlocalQuadrature& quad, std::span<const double> h_on_entries,
                             const Functional& f, const DiscreteFunction& u) {
  require_same_mesh(quad, u, "residual");
  if (f.mesh().get() != quad.mesh.get())
    throw std::invalid_argument("residual: functional mesh mismatch");
  if (h_on_entries.size() != quad.size())
    throw std::invalid_argument("residual: coefficient entry count mismatch");

  const Mesh& m = *quad.mesh;
  const std::vector<double>& uv = u.values();
  double p = quad.kernel.p;
  std::vector<double> acc(static_cast<std::size_t>(m.n_nodes()), 0.0);
  for (std::size_t e = 0; e < quad.size(); ++e) {
    double du = quad.interpolate_xp(uv, e) - quad.interpolate_x(uv, e);
    double t = quad.weight[e] * h_on_entries[e] * odd_power(du, p);
    std::size_t cx = static_cast<std::size_t>(quad.cell_x[e]);
    std::size_t cxp = static_cast<std::size_t>(quad.cell_xp[e]);
    acc[cxp] += t * (1.0 - quad.theta_xp[e]);
    acc[cxp + 1] += t * quad.theta_xp[e];
    acc[cx] -= t * (1.0 - quad.theta_x[e]);
    acc[cx + 1] -= t * quad.theta_x[e];
  }
  std::vector<double> res(static_cast<std::size_t>(m.n_interior()));
  int fi = m.first_interior();
  const std::vector<double>& fc = f.hat_coefficients();
  for (int i = 0; i < m.n_interior(); ++i)
    res[static_cast<std::size_t>(i)] =
        acc[static_cast<std::size_t>(fi + i)] - fc[static_cast<std::size_t>(fi + i)];
  return res;
}

std::vector<double> residual(const NonlocalQuadrature& quad, const CoefficientField& h,
                             const Functional& f, const DiscreteFunction& u) {
  std::vector<double> hv = h.values_on(quad);
  return residual(quad, hv, f, u);
}

PairField nonlocal_gradient(const QuadraturePtr& quad, const DiscreteFunction& u) {
  if (!quad) throw std::invalid_argument("nonlocal_gradient: null quadrature");
  require_same_mesh(*quad, u, "nonlocal_gradient");
  const std::vector<double>& uv = u.values();
  double inv_p = 1.0 / quad->kernel.p;
  std::vector<double> vals(quad->size());
  for (std::size_t e = 0; e < quad->size(); e += 2) {
    double d = quad->interpolate_xp(uv, e) - quad->interpolate_x(uv, e);
    double val = std::pow(quad->kval[e], inv_p) * d / quad->separation(e);
    vals[e] = val;
    vals[e + 1] = -val;
  }
  return PairField(quad, std::move(vals), true);
}

PairField flux(const QuadraturePtr& quad, std::span<const double> h_on_entries,
               const DiscreteFunction& u) {
  if (!quad) throw std::invalid_argument("flux: null quadrature");
  require_same_mesh(*quad, u, "flux");
  if (h_on_entries.size() != quad->size())
    throw std::invalid_argument("flux: coefficient entry count mismatch");
  const std::vector<double>& uv = u.values();
  double p = quad->kernel.p;
  double conj_exp = 1.0 - 1.0 / p;  // 1/p'
  std::vector<double> vals(quad->size());
  for (std::size_t e = 0; e < quad->size(); e += 2) {
    double d = quad->interpolate_xp(uv, e) - quad->interpolate_x(uv, e);
    double r = quad->separation(e);
    double val = h_on_entries[e] * std::pow(quad->kval[e], conj_exp) * odd_power(d, p) /
                 std::pow(r, p - 1.0);
    vals[e] = val;
    vals[e + 1] = -val;
  }
  return PairField(quad, std::move(vals), true);
}

PairField flux(const QuadraturePtr& quad, const CoefficientField& h, const DiscreteFunction& u) {
  if (!quad) throw std::invalid_argument("flux: null quadrature");
  std::vector<double> hv = h.values_on(*quad);
  return flux(quad, hv, u);
}

double pair_fields(const PairField& a, const PairField& b) {
  if (a.quad().get() != b.quad().get())
    throw std::invalid_argument("pair_fields: fields live on different quadratures");
  const NonlocalQuadrature& quad = *a.quad();
  KahanSum acc;
  for (std::size_t e = 0; e < quad.size(); ++e)
    acc.add(quad.bare_weight[e] * a.value(e) * b.value(e));
  return acc.value();
}

std::vector<double> nonlocal_divergence(const PairField& psi, DivergenceForm form) {
  if (!psi.antisymmetric() || !psi.antisymmetry_holds())
    throw std::invalid_argument("nonlocal_divergence: field must be exactly antisymmetric");
  const NonlocalQuadrature& quad = *psi.quad();
  const Mesh& m = *quad.mesh;
  double inv_p = 1.0 / quad.kernel.p;
  std::vector<double> out(static_cast<std::size_t>(m.n_nodes()), 0.0);
  for (std::size_t e = 0; e < quad.size(); ++e) {
    double diff = form == DivergenceForm::Difference
                      ? psi.value(NonlocalQuadrature::mirror(e)) - psi.value(e)
                      : -2.0 * psi.value(e);
    double t = quad.bare_weight[e] * std::pow(quad.kval[e], inv_p) / quad.separation(e) * diff;
    std::size_t cx = static_cast<std::size_t>(quad.cell_x[e]);
    out[cx] += t * (1.0 - quad.theta_x[e]);
    out[cx + 1] += t * quad.theta_x[e];
  }
  return out;
}

IntegrationByParts integration_by_parts_gap(const PairField& psi, const DiscreteFunction& v) {
  const NonlocalQuadrature& quad = *psi.quad();
  require_same_mesh(quad, v, "integration_by_parts_gap");
  std::vector<double> div = nonlocal_divergence(psi, DivergenceForm::Difference);
  KahanSum lhs;
  for (std::size_t i = 0; i < div.size(); ++i) lhs.add(div[i] * v.values()[i]);

  const std::vector<double>& vv = v.values();
  double inv_p = 1.0 / quad.kernel.p;
  KahanSum rhs;
  for (std::size_t e = 0; e < quad.size(); ++e) {
    double d = quad.interpolate_xp(vv, e) - quad.interpolate_x(vv, e);
    double dv = std::pow(quad.kval[e], inv_p) * d / quad.separation(e);
    rhs.add(quad.bare_weight[e] * psi.value(e) * dv);
  }
  double l = lhs.value();
  double r = rhs.value();
  return {l, r, std::abs(l - r)};
}

double flux_pairing(const PairField& psi, const std::function<double(double, double)>& G) {
  const NonlocalQuadrature& quad = *psi.quad();
  KahanSum acc;
  for (std::size_t e = 0; e < quad.size(); ++e)
    acc.add(quad.bare_weight[e] * psi.value(e) * G(quad.point_xp(e), quad.point_x(e)));
  return acc.value();
}

std::string MonotonicityReport::to_json() const {
  nlohmann::json j;
  j["p"] = p;
  j["samples"] = samples;
  j["pairing_violations"] = pairing_violations;
  j["lower_bound_violations"] = lower_bound_violations;
  j["c_empirical"] = c_empirical;
  j["C_empirical"] = C_empirical;
  j["pass"] = pass();
  return j.dump(2);
}

MonotonicityReport monotonicity_check(double p, std::int64_t samples) {
  if (p <= 1.0) throw std::domain_error("monotonicity_check: requires p > 1");
  if (samples < 1) throw std::invalid_argument("monotonicity_check: requires samples >= 1");
  MonotonicityReport rep;
  rep.p = p;
  rep.samples = samples;
  std::mt19937_64 gen(0x70326d6f6e6fULL);
  double cmin = std::numeric_limits<double>::infinity();
  double cmax = 0.0;
  double lower_coef = std::pow(2.0, 2.0 - p);
  for (std::int64_t s = 0; s < samples; ++s) {
    double a = -10.0 + 20.0 * unit_draw(gen);
    double b = -10.0 + 20.0 * unit_draw(gen);
    double phi = (odd_power(a, p) - odd_power(b, p)) * (a - b);
    if (phi < 0.0) ++rep.pairing_violations;
    if (p >= 2.0) {
      // 1e-12 relative slack absorbs rounding near the equality case a = -b
      double bound = lower_coef * abs_power(a - b, p);
      if (phi < bound * (1.0 - 1e-12)) ++rep.lower_bound_violations;
    }
    if (a != b) {
      double denom = std::pow(std::fabs(a) + std::fabs(b), p - 2.0) * (a - b) * (a - b);
      if (denom > 0.0 && std::isfinite(denom)) {
        double ratio = phi / denom;
        cmin = std::min(cmin, ratio);
        cmax = std::max(cmax, ratio);
      }
    }
  }
  rep.c_empirical = std::isfinite(cmin) ? cmin : 0.0;
  rep.C_empirical = cmax;
  return rep;
}

}  // namespace nlplap
