#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "nlplap/forms.hpp"
#include "nlplap/quadrature.hpp"
#include "oracles.hpp"

using namespace nlplap;

namespace {

DiscreteFunction center_hat(const MeshPtr& mesh) {
  std::vector<double> v(static_cast<std::size_t>(mesh->n_nodes()), 0.0);
  v[static_cast<std::size_t>(mesh->collar_cells + mesh->n_cells / 2)] = 1.0;
  return DiscreteFunction::from_node_values(mesh, v);
}

}  // namespace

TEST_CASE("entries come in exact mirror pairs") {
  Kernel k = Kernel::truncated_fractional(2.0, 0.5, 1.0, 0.5);
  MeshPtr mesh = build_mesh({0.0, 1.0}, 8, k);
  QuadraturePtr q = assemble_quadrature(mesh, k, 6, 3);
  REQUIRE(q->size() > 0);
  REQUIRE(q->size() % 2 == 0);
  for (std::size_t e = 0; e < q->size(); e += 2) {
    std::size_t m = NonlocalQuadrature::mirror(e);
    REQUIRE(m == e + 1);
    REQUIRE(q->cell_x[m] == q->cell_xp[e]);
    REQUIRE(q->cell_xp[m] == q->cell_x[e]);
    REQUIRE(q->theta_x[m] == q->theta_xp[e]);
    REQUIRE(q->theta_xp[m] == q->theta_x[e]);
    REQUIRE(q->weight[m] == q->weight[e]);
    REQUIRE(q->bare_weight[m] == q->bare_weight[e]);
    REQUIRE(q->kval[m] == q->kval[e]);
  }
}

TEST_CASE("separations live strictly inside (0, delta]") {
  Kernel k = Kernel::truncated_fractional(2.0, 0.25, 1.0, 0.5);
  MeshPtr mesh = build_mesh({0.0, 1.0}, 8, k);
  QuadraturePtr q = assemble_quadrature(mesh, k, 6, 4);
  double lo = mesh->node(0), hi = mesh->node(mesh->n_nodes() - 1);
  for (std::size_t e = 0; e < q->size(); ++e) {
    double r = q->separation(e);
    REQUIRE(r > 0.0);
    REQUIRE(r <= k.delta * (1.0 + 1e-14));
    REQUIRE(q->point_x(e) >= lo);
    REQUIRE(q->point_x(e) <= hi);
    REQUIRE(q->point_xp(e) >= lo);
    REQUIRE(q->point_xp(e) <= hi);
    REQUIRE(q->weight[e] > 0.0);
    REQUIRE(q->bare_weight[e] > 0.0);
  }
}

TEST_CASE("entry weight factors as bare weight times combined kernel weight") {
  Kernel k = Kernel::truncated_fractional(2.0, 0.75, 1.0, 0.5);
  MeshPtr mesh = build_mesh({0.0, 1.0}, 4, k);
  QuadraturePtr q = assemble_quadrature(mesh, k, 6, 3);
  for (std::size_t e = 0; e < q->size(); ++e) {
    double r = q->separation(e);
    double want = q->bare_weight[e] * q->kval[e] / std::pow(r, k.p);
    REQUIRE(q->weight[e] == doctest::Approx(want).epsilon(1e-12));
    REQUIRE(q->kval[e] == doctest::Approx(eval_kernel(k, r)).epsilon(1e-12));
  }
}

TEST_CASE("horizon of one cell keeps only adjacent and self pairs") {
  Kernel k = Kernel::truncated_constant(2.0, 0.5, 1.0, 0.25);
  MeshPtr mesh = build_mesh({0.0, 1.0}, 4, k);
  QuadraturePtr q = assemble_quadrature(mesh, k, 6, 3);
  REQUIRE(q->size() > 0);
  for (std::size_t e = 0; e < q->size(); ++e)
    REQUIRE(std::abs(q->cell_xp[e] - q->cell_x[e]) <= 1);

  // with no graded levels every pair touches the diagonal and is dropped
  QuadraturePtr q0 = assemble_quadrature(mesh, k, 0, 3);
  CHECK(q0->size() == 0);
  CHECK(q0->total_weight() == 0.0);
  CHECK(energy_B(*q0, center_hat(mesh)) == 0.0);
}

TEST_CASE("panels tile each pair's separation range without gaps") {
  Kernel k = Kernel::truncated_fractional(2.0, 0.5, 1.0, 0.6);
  MeshPtr mesh = build_mesh({0.0, 1.0}, 8, k);
  QuadraturePtr q = assemble_quadrature(mesh, k, 5, 3);
  double h = mesh->spacing;
  double Delta = k.delta / h;

  std::map<std::pair<int, int>, std::vector<Panel>> by_pair;
  for (const Panel& p : q->panels) by_pair[{p.cell_x, p.cell_xp}].push_back(p);
  REQUIRE(!by_pair.empty());

  for (auto& [key, panels] : by_pair) {
    std::sort(panels.begin(), panels.end(),
              [](const Panel& a, const Panel& b) { return a.t0 < b.t0; });
    for (std::size_t i = 0; i + 1 < panels.size(); ++i)
      REQUIRE(panels[i].t1 == panels[i + 1].t0);  // contiguous, no overlap
    int dc = std::abs(key.second - key.first);
    double top = panels.back().t1;
    double bottom = panels.front().t0;
    REQUIRE(bottom > 0.0);
    REQUIRE(top <= k.delta * (1.0 + 1e-14));
    if (dc >= 2) {
      // separated pairs carry the full range [(dc-1)h, min(dc+1, Delta)h]
      REQUIRE(bottom == doctest::Approx((dc - 1) * h).epsilon(1e-14));
      REQUIRE(top == doctest::Approx(std::min<double>(dc + 1, Delta) * h).epsilon(1e-14));
    } else {
      // diagonal-touching pairs: geometric bands, each twice the one below
      double cap = std::min(1.0, Delta) * h;
      std::size_t graded = 0;
      for (const Panel& p : panels)
        if (p.t1 <= cap * (1.0 + 1e-14)) ++graded;
      REQUIRE(graded >= 5);
      for (std::size_t i = 0; i + 1 < graded; ++i)
        REQUIRE(panels[i].t1 == doctest::Approx(2.0 * panels[i].t0).epsilon(1e-14));
    }
  }
}

TEST_CASE("total weight against the exact per-band integral") {
  for (int which = 0; which < 2; ++which) {
    Kernel k = which == 0 ? Kernel::truncated_constant(2.0, 0.5, 1.0, 0.5)
                          : Kernel::truncated_fractional(2.0, 0.75, 1.0, 0.5);
    MeshPtr mesh = build_mesh({0.0, 1.0}, 4, k);
    INFO("family ", k.family_name());

    QuadraturePtr q6 = assemble_quadrature(mesh, k, 6, 6);
    double exact6 = oracle::total_weight_exact(*q6);
    CHECK(q6->total_weight() == doctest::Approx(exact6).epsilon(1e-6));

    QuadraturePtr q10 = assemble_quadrature(mesh, k, 6, 10);
    double exact10 = oracle::total_weight_exact(*q10);
    CHECK(q10->total_weight() == doctest::Approx(exact10).epsilon(1e-12));

    double rel6 = std::fabs(q6->total_weight() - exact6) / exact6;
    double rel10 = std::fabs(q10->total_weight() - exact10) / exact10;
    CHECK(rel10 < rel6);
  }
}

TEST_CASE("center hat energy against the closed form") {
  // flat kernel c0=1, delta=1/2, p=2 on four cells: the energy of the middle
  // hat reduces to 4 int_0^2 (B(0)-B(tau))/tau^2 dtau with B the triangle
  // autocorrelation, which evaluates to 8 ln 2 - 4/3.
  double truth = 8.0 * std::log(2.0) - 4.0 / 3.0;
  Kernel k = Kernel::truncated_constant(2.0, 0.5, 1.0, 0.5);
  MeshPtr mesh = build_mesh({0.0, 1.0}, 4, k);
  DiscreteFunction hat = center_hat(mesh);

  QuadraturePtr coarse = assemble_quadrature(mesh, k, 6, 3);
  QuadraturePtr fine = assemble_quadrature(mesh, k, 14, 8);
  double e_coarse = energy_B(*coarse, hat);
  double e_fine = energy_B(*fine, hat);
  CHECK(e_fine == doctest::Approx(truth).epsilon(1e-4));
  CHECK(std::fabs(e_fine - truth) < std::fabs(e_coarse - truth));
  CHECK(std::fabs(e_coarse - truth) / truth < 2e-2);
}

TEST_CASE("energies self-converge as grading deepens") {
  for (double s : {0.25, 0.5}) {
    Kernel k = Kernel::truncated_fractional(2.0, s, 1.0, 0.5);
    MeshPtr mesh = build_mesh({0.0, 1.0}, 4, k);
    DiscreteFunction hat = center_hat(mesh);
    double e2 = energy_B(*assemble_quadrature(mesh, k, 2, 8), hat);
    double e4 = energy_B(*assemble_quadrature(mesh, k, 4, 8), hat);
    double e8 = energy_B(*assemble_quadrature(mesh, k, 8, 8), hat);
    double e16 = energy_B(*assemble_quadrature(mesh, k, 16, 8), hat);
    double d1 = std::fabs(e4 - e2), d2 = std::fabs(e8 - e4), d3 = std::fabs(e16 - e8);
    INFO("s=", s);
    CHECK(d2 * 1.5 <= d1);
    CHECK(d3 * 1.5 <= d2);
  }
}

TEST_CASE("threaded assembly is bitwise identical to sequential") {
  Kernel k = Kernel::truncated_fractional(2.0, 0.5, 1.0, 0.5);
  MeshPtr mesh = build_mesh({0.0, 1.0}, 16, k);
  QuadraturePtr a = assemble_quadrature(mesh, k, 6, 3, 1);
  QuadraturePtr b = assemble_quadrature(mesh, k, 6, 3, 3);
  REQUIRE(a->size() == b->size());
  REQUIRE(a->weight == b->weight);
  REQUIRE(a->bare_weight == b->bare_weight);
  REQUIRE(a->kval == b->kval);
  REQUIRE(a->cell_x == b->cell_x);
  REQUIRE(a->cell_xp == b->cell_xp);
  REQUIRE(a->theta_x == b->theta_x);
  REQUIRE(a->theta_xp == b->theta_xp);
}

TEST_CASE("weights are translation invariant") {
  Kernel k = Kernel::truncated_fractional(2.0, 0.5, 1.0, 0.5);
  MeshPtr m0 = build_mesh({0.0, 1.0}, 8, k);
  MeshPtr m10 = build_mesh({10.0, 11.0}, 8, k);
  QuadraturePtr a = assemble_quadrature(m0, k, 6, 3);
  QuadraturePtr b = assemble_quadrature(m10, k, 6, 3);
  REQUIRE(a->size() == b->size());
  CHECK(a->weight == b->weight);
  CHECK(a->cell_x == b->cell_x);
  CHECK(a->theta_x == b->theta_x);
}

TEST_CASE("assembled operator respects the mesh reflection symmetry") {
  Kernel k = Kernel::truncated_constant(2.0, 0.5, 1.0, 0.5);
  MeshPtr mesh = build_mesh({0.0, 1.0}, 8, k);
  QuadraturePtr q = assemble_quadrature(mesh, k, 6, 3);
  Eigen::MatrixXd A = oracle::dense_galerkin(*q, {});
  int n = static_cast<int>(A.rows());
  double scale = A.cwiseAbs().maxCoeff();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      REQUIRE(std::fabs(A(i, j) - A(j, i)) <= 1e-13 * scale);
      REQUIRE(std::fabs(A(i, j) - A(n - 1 - i, n - 1 - j)) <= 1e-12 * scale);
    }
}

TEST_CASE("declared panel tolerance tightens with the rule order") {
  Kernel k = Kernel::truncated_fractional(2.0, 0.5, 1.0, 0.5);
  MeshPtr mesh = build_mesh({0.0, 1.0}, 4, k);
  double t3 = assemble_quadrature(mesh, k, 6, 3)->declared_panel_tol;
  double t6 = assemble_quadrature(mesh, k, 6, 6)->declared_panel_tol;
  double t10 = assemble_quadrature(mesh, k, 6, 10)->declared_panel_tol;
  CHECK(t3 > t6);
  CHECK(t6 > t10);
  CHECK(t10 > 0.0);
}

TEST_CASE("pair table dump") {
  Kernel k = Kernel::truncated_constant(2.0, 0.5, 1.0, 0.25);
  MeshPtr mesh = build_mesh({0.0, 1.0}, 4, k);
  QuadraturePtr q = assemble_quadrature(mesh, k, 3, 2);
  std::ostringstream os;
  q->dump_pair_table_csv(os);
  std::istringstream is(os.str());
  std::string line;
  REQUIRE(std::getline(is, line));
  CHECK(line == "x,x_prime,weight");
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == q->size());
}

TEST_CASE("assembly rejects out-of-range rule parameters") {
  Kernel k = Kernel::truncated_constant(2.0, 0.5, 1.0, 0.5);
  MeshPtr mesh = build_mesh({0.0, 1.0}, 4, k);
  CHECK_THROWS_AS(assemble_quadrature(mesh, k, 6, 0), std::invalid_argument);
  CHECK_THROWS_AS(assemble_quadrature(mesh, k, 6, 31), std::invalid_argument);
  CHECK_THROWS_AS(assemble_quadrature(mesh, k, -1, 3), std::invalid_argument);
  CHECK_THROWS_AS(assemble_quadrature(mesh, k, 41, 3), std::invalid_argument);
}
