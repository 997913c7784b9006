#pragma once

#include <string>
#include <vector>

#include "nlplap/coefficients.hpp"
#include "nlplap/forms.hpp"
#include "nlplap/quadrature.hpp"

namespace nlplap {

// AutoLinear solves the p = 2 Galerkin system with conjugate gradients and
// falls back to descent for every other p. Descent forces the first-order
// path even at p = 2.
enum class SolveMethod { AutoLinear, Descent };

struct LineSearch {
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
};

struct SolveOptions {
  double tol = 1e-8;     // max-norm of the interior residual
  int max_iters = 10000;
  SolveMethod method = SolveMethod::AutoLinear;
  LineSearch line_search;
  // Optional starting iterate (interior node values). Empty means the zero
  // function, the default feasible start.
  std::vector<double> initial_interior;
};

struct SolveReport {
  int iterations = 0;
  double final_residual_norm = 0.0;
  double objective_value = 0.0;  // m = J_h(u) at the returned iterate
  bool converged = false;
  double wall_time = 0.0;  // seconds
  std::string to_json() const;
};

struct SolveResult {
  DiscreteFunction u;
  SolveReport report;
};

// Minimizes J_h over the constrained space. p must match the kernel the
// quadrature was assembled with. Non-convergence is reported, not thrown;
// p <= 1 throws std::domain_error.
SolveResult solve(const QuadraturePtr& quad, const CoefficientField& h, const Functional& f,
                  double p, const SolveOptions& opts = {});

struct PoincareOptions {
  double grad_tol = 1e-9;  // max-norm of the quotient gradient, relative
  int max_iters = 20000;
};

struct PoincareReport {
  double estimate = 0.0;  // inf of energy_B(w) / ||w||_{L^p}^p over the constrained space
  int iterations = 0;
  bool converged = false;
  double wall_time = 0.0;
  std::string to_json() const;
};

// Estimates the discrete Poincare constant by normalized descent on the
// Rayleigh quotient. The quotient is scale invariant, so iterates are
// renormalized to unit L^p norm without changing the objective.
PoincareReport poincare_estimate(const QuadraturePtr& quad, double p,
                                 const PoincareOptions& opts = {});

}  // namespace nlplap
