#pragma once

#include <string>
#include <vector>

#include "nlplap/coefficients.hpp"
#include "nlplap/forms.hpp"
#include "nlplap/kernel.hpp"
#include "nlplap/mesh.hpp"
#include "nlplap/solver.hpp"

namespace nlplap {

// Separable two-point test function G(x', x) = bump(x') * bump(x) built from
// raised-cosine bumps. Each factor is continuous and compactly supported.
// The two factors are allowed distinct centers: a field that is antisymmetric
// under the swap (x, x') -> (x', x) pairs to exactly zero against any
// swap-symmetric G, so informative pairings need offset factors.
struct TwoPointBump {
  double xp_center = 0.0;
  double xp_halfwidth = 0.0;
  double x_center = 0.0;
  double x_halfwidth = 0.0;
  double operator()(double xp, double x) const;
};

// Three bumps with pairwise disjoint mid-domain supports on (0,1)^2, offset
// so the pairings do not degenerate; supports stay within a 0.25 horizon.
std::vector<TwoPointBump> default_test_functions();

struct ExperimentSpec {
  Kernel kernel = Kernel::truncated_fractional(2.0, 0.5, 1.0, 0.5);
  Interval omega{0.0, 1.0};
  int n_cells = 128;
  int near_diag_levels = 6;
  int gauss_order = 3;
  int threads = 1;
  double p = 2.0;  // must agree with kernel.p
  double f_density = 1.0;
  CoefficientSequence sequence = CoefficientSequence::separable_oscillation(1.0, 0.5);
  std::vector<int> indices{4, 8, 16, 32};  // strictly increasing, at least two
  std::vector<TwoPointBump> test_functions = default_test_functions();
  SolveOptions solver;
};

struct ExperimentRow {
  int j = 0;
  double lp_error = 0.0;
  double x0_error = 0.0;
  double energy_gap = 0.0;
  double min_gap = 0.0;
  std::vector<double> flux_gaps;
  double wall_time = 0.0;
  bool converged = true;  // recorded in the JSON mirror, not the CSV
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;
  int n_flux = 0;  // flux gap columns, kept even when rows is empty
  DiscreteFunction limit_solution;
  double limit_energy = 0.0;
  double limit_min = 0.0;
  bool limit_converged = false;
  std::string to_json() const;
};

// Solves the limit problem with the sequence's weak-* limit coefficient,
// then each member problem, and compares. A member solve that fails to
// converge is marked and the run continues; a limit solve failure throws.
// Deterministic for a fixed spec.
ExperimentReport run_experiment(const ExperimentSpec& spec);

// Fixed header (j, lp_error, x0_error, energy_gap, min_gap, flux_gap_1, ...,
// wall_time), one row per j, full double precision. Parsing the text back
// recovers every numeric field bit-exactly.
std::string report_to_csv(const ExperimentReport& report);
ExperimentReport report_from_csv(const std::string& csv);

}  // namespace nlplap
