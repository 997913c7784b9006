#include "nlplap/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace nlplap {

namespace {

double checker_value(double lo, double hi, int m, double x, double xp) {
  long long a = static_cast<long long>(std::floor(m * x));
  long long b = static_cast<long long>(std::floor(m * xp));
  long long parity = ((a + b) % 2 + 2) % 2;
  return parity == 0 ? lo : hi;
}

}  // namespace

CoefficientField CoefficientField::constant(double value) {
  if (!(value > 0.0)) throw std::invalid_argument("coefficient: constant value must be > 0");
  CoefficientField f;
  f.body_ = Constant{value};
  f.h_min_ = f.h_max_ = value;
  return f;
}

CoefficientField CoefficientField::separable_oscillation(double alpha, double beta, int freq) {
  if (!(alpha - std::fabs(beta) > 0.0))
    throw std::invalid_argument("coefficient: oscillation must stay positive (alpha > |beta|)");
  if (freq < 1) throw std::invalid_argument("coefficient: oscillation index must be >= 1");
  CoefficientField f;
  f.body_ = SeparableOscillation{alpha, beta, freq};
  f.h_min_ = alpha - std::fabs(beta);
  f.h_max_ = alpha + std::fabs(beta);
  return f;
}

CoefficientField CoefficientField::checkerboard(double lo, double hi, int cells_per_unit) {
  if (!(std::min(lo, hi) > 0.0))
    throw std::invalid_argument("coefficient: checkerboard tones must be > 0");
  if (cells_per_unit < 1)
    throw std::invalid_argument("coefficient: cells_per_unit must be >= 1");
  CoefficientField f;
  f.body_ = Checkerboard{lo, hi, cells_per_unit};
  f.h_min_ = std::min(lo, hi);
  f.h_max_ = std::max(lo, hi);
  return f;
}

CoefficientField CoefficientField::tabulated(QuadraturePtr quad, std::vector<double> raw) {
  if (!quad) throw std::invalid_argument("coefficient: tabulated field needs a quadrature");
  if (raw.size() != quad->size())
    throw std::invalid_argument("coefficient: tabulated value count does not match quadrature");
  // Symmetrize across mirror entries so the field is exactly swap-invariant.
  auto values = std::make_shared<std::vector<double>>(raw.size());
  for (std::size_t e = 0; e < raw.size(); e += 2) {
    double v = 0.5 * (raw[e] + raw[e + 1]);
    (*values)[e] = v;
    (*values)[e + 1] = v;
  }
  double lo = *std::min_element(values->begin(), values->end());
  double hi = *std::max_element(values->begin(), values->end());
  if (!(lo > 0.0)) throw std::invalid_argument("coefficient: tabulated values must be > 0");
  CoefficientField f;
  f.body_ = Tabulated{std::move(quad), std::move(values)};
  f.h_min_ = lo;
  f.h_max_ = hi;
  return f;
}

std::string CoefficientField::family_name() const {
  if (std::holds_alternative<Constant>(body_)) return "constant";
  if (std::holds_alternative<SeparableOscillation>(body_)) return "separable_oscillation";
  if (std::holds_alternative<Checkerboard>(body_)) return "checkerboard";
  return "tabulated_pairs";
}

double eval_coeff(const CoefficientField& field, double x, double x_prime) {
  double v = 0.0;
  if (const auto* c = std::get_if<CoefficientField::Constant>(&field.body_)) {
    v = c->value;
  } else if (const auto* o = std::get_if<CoefficientField::SeparableOscillation>(&field.body_)) {
    double w = 2.0 * std::numbers::pi * o->freq;
    v = o->alpha + o->beta * (std::sin(w * x) * std::sin(w * x_prime));
  } else if (const auto* cb = std::get_if<CoefficientField::Checkerboard>(&field.body_)) {
    v = checker_value(cb->lo, cb->hi, cb->cells_per_unit, x, x_prime);
  } else {
    const auto& tab = std::get<CoefficientField::Tabulated>(field.body_);
    const NonlocalQuadrature& q = *tab.quad;
    for (std::size_t e = 0; e < q.size(); ++e)
      if (q.point_x(e) == x && q.point_xp(e) == x_prime) return (*tab.values)[e];
    throw std::domain_error("eval_coeff: tabulated field queried off its pair set");
  }
  if (!(v >= field.h_min_ - 1e-12 && v <= field.h_max_ + 1e-12))
    throw std::logic_error("eval_coeff: value escaped the coefficient band");
  return v;
}

std::vector<double> CoefficientField::values_on(const NonlocalQuadrature& quad) const {
  if (const auto* tab = std::get_if<Tabulated>(&body_)) {
    if (tab->quad.get() != &quad)
      throw std::invalid_argument("coefficient: tabulated field bound to a different quadrature");
    return *tab->values;
  }
  std::vector<double> out(quad.size());
  for (std::size_t e = 0; e < quad.size(); ++e)
    out[e] = eval_coeff(*this, quad.point_x(e), quad.point_xp(e));
  return out;
}

CoefficientSequence CoefficientSequence::constant(double value) {
  CoefficientField::constant(value);  // validate
  CoefficientSequence s;
  s.body_ = ConstantSeq{value};
  return s;
}

CoefficientSequence CoefficientSequence::separable_oscillation(double alpha, double beta) {
  CoefficientField::separable_oscillation(alpha, beta, 1);  // validate
  CoefficientSequence s;
  s.body_ = SeparableOscillationSeq{alpha, beta};
  return s;
}

CoefficientSequence CoefficientSequence::checkerboard(double lo, double hi) {
  CoefficientField::checkerboard(lo, hi, 1);  // validate
  CoefficientSequence s;
  s.body_ = CheckerboardSeq{lo, hi};
  return s;
}

CoefficientField CoefficientSequence::member(int j) const {
  if (j < 1) throw std::invalid_argument("coefficient sequence: index must be >= 1");
  if (const auto* c = std::get_if<ConstantSeq>(&body_))
    return CoefficientField::constant(c->value);
  if (const auto* o = std::get_if<SeparableOscillationSeq>(&body_))
    return CoefficientField::separable_oscillation(o->alpha, o->beta, j);
  const auto& cb = std::get<CheckerboardSeq>(body_);
  return CoefficientField::checkerboard(cb.lo, cb.hi, j);
}

CoefficientField CoefficientSequence::weak_star_limit() const {
  if (const auto* c = std::get_if<ConstantSeq>(&body_))
    return CoefficientField::constant(c->value);
  if (const auto* o = std::get_if<SeparableOscillationSeq>(&body_))
    return CoefficientField::constant(o->alpha);
  const auto& cb = std::get<CheckerboardSeq>(body_);
  return CoefficientField::constant(0.5 * (cb.lo + cb.hi));
}

std::string CoefficientSequence::family_name() const {
  if (std::holds_alternative<ConstantSeq>(body_)) return "constant";
  if (std::holds_alternative<SeparableOscillationSeq>(body_)) return "separable_oscillation";
  return "checkerboard";
}

}  // namespace nlplap
