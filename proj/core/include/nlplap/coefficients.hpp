#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "nlplap/quadrature.hpp"

namespace nlplap {

// Bounded symmetric two-point coefficients h(x, x'), the material data the
// energy is weighted with. Every field is symmetric under argument swap and
// confined to a positive band [h_min, h_max]; evaluation enforces the band.
class CoefficientField {
 public:
  struct Constant {
    double value;
  };
  // alpha + beta * sin(2 pi j x) * sin(2 pi j x'), oscillation index j.
  struct SeparableOscillation {
    double alpha;
    double beta;
    int freq;
  };
  // Two-tone checkerboard: tone picked by the parity of floor(m x) + floor(m x').
  struct Checkerboard {
    double lo;
    double hi;
    int cells_per_unit;
  };
  // Values given on the entries of one quadrature, symmetrized at load.
  // Point queries only resolve on that entry set.
  struct Tabulated {
    QuadraturePtr quad;
    std::shared_ptr<const std::vector<double>> values;
  };

  static CoefficientField constant(double value);
  static CoefficientField separable_oscillation(double alpha, double beta, int freq);
  static CoefficientField checkerboard(double lo, double hi, int cells_per_unit);
  static CoefficientField tabulated(QuadraturePtr quad, std::vector<double> raw_values);

  double h_min() const { return h_min_; }
  double h_max() const { return h_max_; }
  std::string family_name() const;

  bool is_tabulated() const { return std::holds_alternative<Tabulated>(body_); }
  const Tabulated& tabulated_body() const { return std::get<Tabulated>(body_); }

  // h on the entries of a quadrature, band-checked. For tabulated fields the
  // quadrature must be the one the values were loaded on.
  std::vector<double> values_on(const NonlocalQuadrature& quad) const;

 private:
  std::variant<Constant, SeparableOscillation, Checkerboard, Tabulated> body_;
  double h_min_ = 0.0;
  double h_max_ = 0.0;
  friend double eval_coeff(const CoefficientField&, double, double);
};

// h(x, x'). Symmetric in its arguments. Throws std::domain_error if a
// tabulated field is queried off its pair set, and std::logic_error if an
// evaluated value escapes the band (a broken field definition).
double eval_coeff(const CoefficientField& field, double x, double x_prime);

// A sequence of coefficient fields indexed by j, with its weak-* limit.
class CoefficientSequence {
 public:
  struct ConstantSeq {
    double value;
  };
  struct SeparableOscillationSeq {
    double alpha;
    double beta;
  };
  struct CheckerboardSeq {
    double lo;
    double hi;
  };

  static CoefficientSequence constant(double value);
  static CoefficientSequence separable_oscillation(double alpha, double beta);
  static CoefficientSequence checkerboard(double lo, double hi);

  CoefficientField member(int j) const;
  CoefficientField weak_star_limit() const;
  std::string family_name() const;

 private:
  std::variant<ConstantSeq, SeparableOscillationSeq, CheckerboardSeq> body_;
};

}  // namespace nlplap
