// Acceptance gate: every release-blocking check in one binary. Each check
// prints exactly one [PASS]/[FAIL] line; the exit status is the number of
// failures. Tolerances are part of the contract and are not configurable.

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <iostream>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nlplap/commands.hpp"
#include "nlplap/experiment.hpp"
#include "nlplap/solver.hpp"
#include "oracles.hpp"

using namespace nlplap;
namespace fs = std::filesystem;

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

struct Gate {
  int failures = 0;
  int index = 0;
  void run(const std::string& what, const std::function<bool()>& body) {
    ++index;
    double t0 = now_seconds();
    bool ok = false;
    std::string note;
    try {
      ok = body();
    } catch (const std::exception& e) {
      note = std::string(" [threw: ") + e.what() + "]";
    }
    double dt = now_seconds() - t0;
    std::printf("[%s] criterion %d: %s (%.2fs)%s\n", ok ? "PASS" : "FAIL", index, what.c_str(),
                dt, note.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return 1e300;
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

// ---- 1: small problem against direct oracles, under one second ------------

bool small_problem_oracles() {
  double t0 = now_seconds();
  Kernel k2 = Kernel::truncated_constant(2.0, 0.5, 1.0, 0.5);
  MeshPtr mesh = build_mesh({0.0, 1.0}, 4, k2);
  QuadraturePtr quad = assemble_quadrature(mesh, k2, 6, 3);
  CoefficientField one = CoefficientField::constant(1.0);
  Functional f = Functional::density(mesh, 1.0);

  std::vector<double> want = oracle::dense_solve_p2(*quad, {}, f);
  bool ok = true;
  for (SolveMethod m : {SolveMethod::AutoLinear, SolveMethod::Descent}) {
    SolveOptions o;
    o.method = m;
    SolveResult r = solve(quad, one, f, 2.0, o);
    ok = ok && r.report.converged && max_abs_diff(r.u.interior_values(), want) <= 1e-8;
  }

  Kernel k3 = Kernel::truncated_constant(3.0, 0.5, 1.0, 0.5);
  MeshPtr mesh3 = build_mesh({0.0, 1.0}, 4, k3);
  QuadraturePtr quad3 = assemble_quadrature(mesh3, k3, 6, 3);
  Functional f3 = Functional::density(mesh3, 1.0);
  SolveResult r3 = solve(quad3, one, f3, 3.0);
  std::vector<double> hv(quad3->size(), 1.0);
  auto F = [&](const std::vector<double>& z) {
    return objective_J(*quad3, hv, f3, DiscreteFunction::constrained(mesh3, z));
  };
  std::vector<double> z(static_cast<std::size_t>(mesh3->n_interior()), 0.0);
  z = oracle::coordinate_search_min(F, z, 0.5, 200, 1e-14);
  ok = ok && r3.report.converged && max_abs_diff(r3.u.interior_values(), z) <= 1e-4;

  return ok && (now_seconds() - t0) < 1.0;
}

// ---- 2: integration by parts on random fields, under five seconds ---------

bool integration_by_parts_random() {
  double t0 = now_seconds();
  Kernel k = Kernel::truncated_fractional(2.0, 0.5, 1.0, 0.5);
  MeshPtr mesh = build_mesh({0.0, 1.0}, 32, k);
  QuadraturePtr quad = assemble_quadrature(mesh, k, 6, 3);
  std::mt19937_64 gen(20240501);
  bool ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    PairField psi = PairField::antisymmetric_from_upper(
        quad, [&](std::size_t) { return 2.0 * oracle::unit_draw(gen) - 1.0; });
    DiscreteFunction v = oracle::random_constrained(gen, mesh);
    IntegrationByParts r = integration_by_parts_gap(psi, v);
    ok = ok && r.gap <= 1e-12 * (std::fabs(r.lhs) + 1.0);
  }
  return ok && (now_seconds() - t0) < 5.0;
}

// ---- 3: duality between the weighted form and the flux pairing ------------

bool duality_random_triples() {
  bool ok = true;
  for (double p : {1.5, 2.0, 3.0}) {
    Kernel k = Kernel::truncated_fractional(p, 0.5, 1.0, 0.5);
    MeshPtr mesh = build_mesh({0.0, 1.0}, 16, k);
    QuadraturePtr quad = assemble_quadrature(mesh, k, 6, 3);
    std::mt19937_64 gen(717);
    for (int trial = 0; trial < 100; ++trial) {
      DiscreteFunction u = oracle::random_constrained(gen, mesh);
      DiscreteFunction v = oracle::random_constrained(gen, mesh);
      // a two-point coefficient is symmetric under the swap, so both
      // orientations of a pair carry the same value
      std::vector<double> hv(quad->size());
      for (std::size_t e = 0; e < quad->size(); e += 2)
        hv[e] = hv[e + 1] = 0.5 + 1.5 * oracle::unit_draw(gen);
      double lhs = form_Bh(*quad, hv, u, v);
      double rhs = pair_fields(flux(quad, hv, u), nonlocal_gradient(quad, v));
      ok = ok && std::fabs(lhs - rhs) <= 1e-12 * (std::fabs(lhs) + 1.0);
    }
  }
  return ok;
}

// ---- 4: scalar and operator monotonicity ----------------------------------

bool monotonicity_sweep() {
  bool ok = true;
  for (double p : {1.5, 2.0, 3.0}) {
    MonotonicityReport rep = monotonicity_check(p, 1000000);
    ok = ok && rep.pairing_violations == 0 && rep.lower_bound_violations == 0;

    Kernel k = Kernel::truncated_fractional(p, 0.5, 1.0, 0.5);
    MeshPtr mesh = build_mesh({0.0, 1.0}, 8, k);
    QuadraturePtr quad = assemble_quadrature(mesh, k, 6, 3);
    CoefficientField h = CoefficientField::separable_oscillation(1.0, 0.5, 2);
    std::vector<double> hv = h.values_on(*quad);
    std::mt19937_64 gen(909);
    for (int trial = 0; trial < 100; ++trial) {
      DiscreteFunction u = oracle::random_constrained(gen, mesh);
      DiscreteFunction v = oracle::random_constrained(gen, mesh);
      DiscreteFunction d = subtract(u, v);
      ok = ok && form_Bh(*quad, hv, u, d) - form_Bh(*quad, hv, v, d) > 0.0;
    }
  }
  return ok;
}

// ---- 5: positive smallest quotient, checked against a dense eigensolve ----

bool poincare_positivity() {
  double t0 = now_seconds();
  bool ok = true;

  Kernel flat = Kernel::truncated_constant(2.0, 0.5, 1.0, 0.5);
  MeshPtr mesh = build_mesh({0.0, 1.0}, 16, flat);
  QuadraturePtr quad = assemble_quadrature(mesh, flat, 6, 3);
  PoincareReport rep = poincare_estimate(quad, 2.0);
  double want = oracle::smallest_generalized_eigenvalue(*quad);
  ok = ok && rep.converged && rep.estimate > 0.0 &&
       std::fabs(rep.estimate - want) <= 1e-6 * want;

  for (double s : {0.25, 0.5, 0.75}) {
    Kernel k = Kernel::truncated_fractional(2.0, s, 1.0, 0.5);
    MeshPtr m = build_mesh({0.0, 1.0}, 16, k);
    PoincareReport r = poincare_estimate(assemble_quadrature(m, k, 6, 3), 2.0);
    ok = ok && r.converged && r.estimate > 0.0;
  }

  Kernel k3 = Kernel::truncated_fractional(3.0, 0.5, 1.0, 0.5);
  MeshPtr m3 = build_mesh({0.0, 1.0}, 16, k3);
  PoincareReport r3 = poincare_estimate(assemble_quadrature(m3, k3, 6, 3), 3.0);
  ok = ok && r3.converged && r3.estimate > 0.0;

  // p = 1.5 has an unbounded second derivative at the origin; the quotient
  // value is trustworthy long before the gradient test can trigger
  Kernel k15 = Kernel::truncated_fractional(1.5, 0.5, 1.0, 0.5);
  MeshPtr m15 = build_mesh({0.0, 1.0}, 16, k15);
  PoincareOptions po;
  po.max_iters = 300;
  PoincareReport r15 = poincare_estimate(assemble_quadrature(m15, k15, 6, 3), 1.5, po);
  ok = ok && r15.estimate > 0.0;

  return ok && (now_seconds() - t0) < 10.0;
}

// ---- 6: oscillating-coefficient study converges along the sequence --------

bool row_improves(const ExperimentReport& rep) {
  const ExperimentRow& a = rep.rows.front();
  const ExperimentRow& b = rep.rows.back();
  bool ok = rep.limit_converged && b.lp_error < a.lp_error && b.x0_error < a.x0_error &&
            b.energy_gap < a.energy_gap && b.min_gap < a.min_gap;
  for (const ExperimentRow& r : rep.rows) ok = ok && r.converged;
  for (std::size_t g = 0; g < b.flux_gaps.size(); ++g)
    ok = ok && b.flux_gaps[g] < a.flux_gaps[g];
  return ok;
}

bool oscillation_study() {
  double t0 = now_seconds();
  ExperimentSpec spec;  // fractional kernel, oscillating sequence, n = 128
  ExperimentReport rep = run_experiment(spec);
  bool ok = row_improves(rep);

  ExperimentSpec spec3 = spec;
  spec3.kernel = Kernel::truncated_fractional(3.0, 0.5, 1.0, 0.5);
  spec3.p = 3.0;
  ExperimentReport rep3 = run_experiment(spec3);
  ok = ok && row_improves(rep3);

  return ok && (now_seconds() - t0) < 300.0;
}

// ---- 7: constant sequence is exactly the null experiment ------------------

bool null_experiment() {
  ExperimentSpec spec;
  spec.sequence = CoefficientSequence::constant(1.3);
  spec.n_cells = 64;
  spec.indices = {2, 8};
  ExperimentReport rep = run_experiment(spec);
  double budget = 10.0 * spec.solver.tol;
  bool ok = rep.limit_converged;
  for (const ExperimentRow& r : rep.rows) {
    ok = ok && r.converged && r.lp_error <= budget && r.x0_error <= budget &&
         r.energy_gap <= budget && r.min_gap <= budget;
    for (double fg : r.flux_gaps) ok = ok && fg <= budget;
  }
  return ok;
}

// ---- 8: residual agrees with central differences of the objective ---------

bool residual_is_gradient() {
  bool ok = true;
  for (double p : {1.5, 2.0, 3.0}) {
    Kernel k = Kernel::truncated_fractional(p, 0.5, 1.0, 0.5);
    MeshPtr mesh = build_mesh({0.0, 1.0}, 8, k);
    QuadraturePtr quad = assemble_quadrature(mesh, k, 6, 3);
    CoefficientField h = CoefficientField::separable_oscillation(1.0, 0.5, 2);
    std::vector<double> hv = h.values_on(*quad);
    Functional f = Functional::density(mesh, 1.0);
    std::mt19937_64 gen(11);
    DiscreteFunction u = oracle::random_constrained(gen, mesh);
    std::vector<double> res = residual(*quad, hv, f, u);

    double e1 = 0.0, e2 = 0.0;
    for (int i = 0; i < mesh->n_interior(); ++i) {
      for (double eps : {1e-2, 5e-3}) {
        DiscreteFunction up = u, um = u;
        up.values()[static_cast<std::size_t>(mesh->first_interior() + i)] += eps;
        um.values()[static_cast<std::size_t>(mesh->first_interior() + i)] -= eps;
        double fd = (objective_J(*quad, hv, f, up) - objective_J(*quad, hv, f, um)) / (2.0 * eps);
        double& e = (eps == 1e-2 ? e1 : e2);
        e = std::max(e, std::fabs(fd - res[static_cast<std::size_t>(i)]));
      }
    }
    if (p == 2.0) {
      ok = ok && e1 <= 1e-10;  // the objective is quadratic: differences are exact
    } else {
      double ratio = e1 / e2;
      ok = ok && ratio >= 2.0 && ratio <= 8.0 && e2 < 2e-4;  // second-order shrink
    }
  }
  return ok;
}

// ---- 9: the experiment command is byte-reproducible ------------------------

bool command_reproducibility() {
  fs::path dir = fs::temp_directory_path() / ("nlplab_gate_" + std::to_string(getpid()));
  fs::create_directories(dir);
  fs::path cfg = dir / "config.json";
  {
    std::ofstream out(cfg, std::ios::binary);
    out << R"({
      "kernel": {"family": "truncated_fractional", "p": 2.0, "s": 0.5, "c0": 1.0, "delta": 0.5},
      "mesh": {"a": 0.0, "b": 1.0, "n_cells": 64},
      "sequence": {"family": "separable_oscillation", "alpha": 1.0, "beta": 0.5},
      "functional": {"density": 1.0},
      "experiment": {"indices": [2, 16]}
    })";
  }
  CommandOptions a;
  a.config_path = cfg.string();
  a.out_dir = (dir / "a").string();
  a.seed = 7;
  CommandOptions b = a;
  b.out_dir = (dir / "b").string();

  // the command narrates to stdout/stderr; keep the gate's output clean
  int rc_a, rc_b;
  {
    std::fflush(stdout);
    std::fflush(stderr);
    int keep_out = dup(1), keep_err = dup(2);
    int devnull = open("/dev/null", O_WRONLY);
    dup2(devnull, 1);
    dup2(devnull, 2);
    rc_a = cmd_experiment(a);
    rc_b = cmd_experiment(b);
    std::cout.flush();
    std::cerr.flush();
    dup2(keep_out, 1);
    dup2(keep_err, 2);
    close(devnull);
    close(keep_out);
    close(keep_err);
  }
  if (rc_a != 0 || rc_b != 0) return false;

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  bool ok = true;
  for (const char* name :
       {"experiment.csv", "experiment.json", "plot_lp_error.dat", "plot_x0_error.dat",
        "plot_energy_gap.dat", "plot_min_gap.dat", "plot_flux_gap_1.dat", "plot_flux_gap_2.dat",
        "plot_flux_gap_3.dat"}) {
    std::string va = slurp(dir / "a" / name);
    ok = ok && !va.empty() && va == slurp(dir / "b" / name);
  }
  return ok;
}

}  // namespace

int main() {
  Gate gate;
  gate.run("small-problem solves match direct linear and derivative-free oracles, in under 1s",
           small_problem_oracles);
  gate.run("integration by parts balances 100 random fields to 1e-12, in under 5s",
           integration_by_parts_random);
  gate.run("weighted form equals flux paired with gradient for 100 triples at p in {1.5,2,3}",
           duality_random_triples);
  gate.run("pointwise and operator monotonicity hold on one million samples per p",
           monotonicity_sweep);
  gate.run("smallest quotient is positive for every configured kernel and matches the dense "
           "eigensolve, in under 10s",
           poincare_positivity);
  gate.run("oscillating-coefficient study improves every column from j=4 to j=32 at p=2 and p=3, "
           "in under 5min",
           oscillation_study);
  gate.run("constant-coefficient study keeps every error column at solver noise",
           null_experiment);
  gate.run("interior residual matches central differences of the objective at second order",
           residual_is_gradient);
  gate.run("experiment command output is byte-identical across reruns",
           command_reproducibility);
  if (gate.failures == 0)
    std::printf("acceptance: all %d criteria passed\n", gate.index);
  else
    std::printf("acceptance: %d of %d criteria FAILED\n", gate.failures, gate.index);
  return gate.failures;
}
