#include <benchmark/benchmark.h>

#include <vector>

#include "nlplap/solver.hpp"

using namespace nlplap;

namespace {

QuadraturePtr make_quad(int n_cells, double p = 2.0) {
  Kernel k = Kernel::truncated_fractional(p, 0.5, 1.0, 0.5);
  MeshPtr mesh = build_mesh({0.0, 1.0}, n_cells, k);
  return assemble_quadrature(mesh, k, 6, 3);
}

DiscreteFunction bump(const MeshPtr& mesh) {
  std::vector<double> v(static_cast<std::size_t>(mesh->n_interior()));
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = static_cast<double>(i % 7) / 7.0 - 0.4;
  return DiscreteFunction::constrained(mesh, v);
}

void BM_assemble(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  Kernel k = Kernel::truncated_fractional(2.0, 0.5, 1.0, 0.5);
  MeshPtr mesh = build_mesh({0.0, 1.0}, n, k);
  for (auto _ : state) {
    QuadraturePtr q = assemble_quadrature(mesh, k, 6, 3);
    benchmark::DoNotOptimize(q->total_weight());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * n);
}
BENCHMARK(BM_assemble)->Arg(32)->Arg(64)->Arg(128);

void BM_energy(benchmark::State& state) {
  QuadraturePtr quad = make_quad(static_cast<int>(state.range(0)));
  DiscreteFunction u = bump(quad->mesh);
  for (auto _ : state) benchmark::DoNotOptimize(energy_B(*quad, u));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(quad->size()));
}
BENCHMARK(BM_energy)->Arg(64)->Arg(128);

void BM_weighted_form(benchmark::State& state) {
  QuadraturePtr quad = make_quad(static_cast<int>(state.range(0)));
  DiscreteFunction u = bump(quad->mesh);
  CoefficientField h = CoefficientField::separable_oscillation(1.0, 0.5, 8);
  std::vector<double> hv = h.values_on(*quad);
  for (auto _ : state) benchmark::DoNotOptimize(form_Bh(*quad, hv, u, u));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(quad->size()));
}
BENCHMARK(BM_weighted_form)->Arg(64)->Arg(128);

void BM_residual(benchmark::State& state) {
  QuadraturePtr quad = make_quad(static_cast<int>(state.range(0)));
  DiscreteFunction u = bump(quad->mesh);
  Functional f = Functional::density(quad->mesh, 1.0);
  std::vector<double> hv(quad->size(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(residual(*quad, hv, f, u));
}
BENCHMARK(BM_residual)->Arg(64)->Arg(128);

void BM_solve_p2(benchmark::State& state) {
  QuadraturePtr quad = make_quad(static_cast<int>(state.range(0)));
  CoefficientField h = CoefficientField::constant(1.0);
  Functional f = Functional::density(quad->mesh, 1.0);
  for (auto _ : state) {
    SolveResult r = solve(quad, h, f, 2.0);
    benchmark::DoNotOptimize(r.report.objective_value);
  }
}
BENCHMARK(BM_solve_p2)->Arg(32)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
