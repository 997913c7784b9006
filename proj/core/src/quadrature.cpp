#include "nlplap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "nlplap/gauss.hpp"
#include "nlplap/summation.hpp"

namespace nlplap {

namespace {

struct Buffers {
  std::vector<std::int32_t> cell_x, cell_xp;
  std::vector<double> theta_x, theta_xp;
  std::vector<double> weight, bare_weight, kval;
  std::vector<Panel> panels;
};

// One t band of a cell pair, in units of the spacing. Everything below is
// computed from the index difference dc and dyadic band fractions alone, so
// every cell pair with the same dc produces the same entries bit for bit, no
// matter where the pair sits on the mesh; in particular translating or
// reflecting a symmetric problem cannot move weight from one side to the
// other.
//
// The section at relative separation T is u in [max(0, dc-T), min(1, 1+dc-T)]
// where u is the offset of x within its cell, so its length is the triangle
// profile 1 - |T - dc|. Bands never contain the apex T = dc in their
// interior, keeping the profile affine per band.
void emit_band(const Mesh& mesh, const Kernel& kernel, const GaussRule& rule,
               int ci, int cj, double T0, double T1, Buffers& buf) {
  if (!(T1 > T0)) return;
  double h = mesh.spacing;
  int dc = cj - ci;
  int n = rule.order();
  double midT = 0.5 * (T0 + T1), sT = 0.5 * (T1 - T0);
  for (int gt = 0; gt < n; ++gt) {
    double T = midT + sT * rule.nodes[static_cast<std::size_t>(gt)];
    double tau = T - dc;  // x' offset minus x offset
    double ulo = tau >= 0.0 ? 0.0 : -tau;
    double uhi = tau >= 0.0 ? 1.0 - tau : 1.0;
    double su = 0.5 * (uhi - ulo), mu = 0.5 * (uhi + ulo);
    double r = h * T;
    double k = eval_kernel(kernel, r);
    double wt = rule.weights[static_cast<std::size_t>(gt)] * (sT * h) *
                (k / std::pow(r, kernel.p));
    double gt_only = rule.weights[static_cast<std::size_t>(gt)] * (sT * h);
    for (int gu = 0; gu < n; ++gu) {
      double tx = mu + su * rule.nodes[static_cast<std::size_t>(gu)];
      double ty = tx + tau;
      double gsec = rule.weights[static_cast<std::size_t>(gu)] * (su * h);
      double g = gt_only * gsec;
      double w = wt * gsec;
      // entry and its mirror, adjacent so mirror(e) = e ^ 1
      buf.cell_x.push_back(ci);
      buf.cell_xp.push_back(cj);
      buf.theta_x.push_back(tx);
      buf.theta_xp.push_back(ty);
      buf.cell_x.push_back(cj);
      buf.cell_xp.push_back(ci);
      buf.theta_x.push_back(ty);
      buf.theta_xp.push_back(tx);
      for (int dup = 0; dup < 2; ++dup) {
        buf.weight.push_back(w);
        buf.bare_weight.push_back(g);
        buf.kval.push_back(k);
      }
    }
  }
  buf.panels.push_back(Panel{ci, cj, T0 * h, T1 * h});
}

// Covers the t range of one ordered cell pair: graded geometric bands toward
// the singular end t = 0 when the pair reaches it (dc <= 1), one smooth band
// per side of the apex otherwise, everything clipped at the horizon.
void emit_pair(const Mesh& mesh, const Kernel& kernel, const GaussRule& rule,
               int ci, int cj, int levels, Buffers& buf) {
  int dc = cj - ci;
  double Delta = kernel.delta / mesh.spacing;  // horizon in units of h
  if (dc <= 1) {
    // Rising side [0, min(dc ? 1 : ... , Delta)] graded toward 0. For the
    // self pair the profile is 1 - T on (0, 1]; for the adjacent pair it is
    // T on [0, 1] followed by 2 - T on [1, 2].
    double top = std::min(1.0, Delta);
    if (dc == 1 && Delta > 1.0) emit_band(mesh, kernel, rule, ci, cj, 1.0, std::min(2.0, Delta), buf);
    double hi = top;
    for (int l = 0; l < levels; ++l) {
      double lo = top * std::ldexp(1.0, -(l + 1));
      emit_band(mesh, kernel, rule, ci, cj, lo, hi, buf);
      hi = lo;
    }
    // the sliver (0, top * 2^-levels] is discarded
    return;
  }
  double lo = static_cast<double>(dc) - 1.0;
  emit_band(mesh, kernel, rule, ci, cj, lo, std::min(static_cast<double>(dc), Delta), buf);
  if (Delta > dc)
    emit_band(mesh, kernel, rule, ci, cj, static_cast<double>(dc),
              std::min(static_cast<double>(dc) + 1.0, Delta), buf);
}

}  // namespace

double NonlocalQuadrature::total_weight() const {
  KahanSum acc;
  for (double w : weight) acc.add(w);
  return acc.value();
}

void NonlocalQuadrature::dump_pair_table_csv(std::ostream& os) const {
  os << "x,x_prime,weight\n";
  char line[128];
  for (std::size_t e = 0; e < size(); ++e) {
    std::snprintf(line, sizeof line, "%.17e,%.17e,%.17e\n", point_x(e), point_xp(e),
                  weight[e]);
    os << line;
  }
}

QuadraturePtr assemble_quadrature(MeshPtr mesh, const Kernel& kernel,
                                  int near_diag_levels, int gauss_order, int threads) {
  check_kernel_params(kernel);
  if (gauss_order < 1 || gauss_order > 30)
    throw std::invalid_argument("assemble_quadrature: gauss_order out of range");
  if (near_diag_levels < 0 || near_diag_levels > 40)
    throw std::invalid_argument("assemble_quadrature: near_diag_levels out of range");

  auto quad = std::make_shared<NonlocalQuadrature>();
  quad->mesh = mesh;
  quad->kernel = kernel;
  quad->gauss_order = gauss_order;
  quad->near_diag_levels = near_diag_levels;

  GaussRule rule = gauss_legendre(gauss_order);

  // Ordered upper cell pairs (ci <= cj) whose closest approach is strictly
  // within the horizon; at gap == delta the pair's in-horizon set has zero
  // measure. The mirror orientation is produced entry-wise.
  int nc = mesh->n_total_cells();
  std::vector<std::pair<int, int>> tasks;
  for (int ci = 0; ci < nc; ++ci)
    for (int cj = ci; cj < nc; ++cj) {
      double gap = (cj - ci - 1) * mesh->spacing;
      if (cj > ci + 1 && gap >= kernel.delta) break;
      tasks.emplace_back(ci, cj);
    }

  int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(std::thread::hardware_concurrency())));
  std::vector<Buffers> chunks(static_cast<std::size_t>(nthreads));
  auto run_chunk = [&](int t) {
    std::size_t lo = tasks.size() * static_cast<std::size_t>(t) / static_cast<std::size_t>(nthreads);
    std::size_t hi = tasks.size() * (static_cast<std::size_t>(t) + 1) / static_cast<std::size_t>(nthreads);
    for (std::size_t i = lo; i < hi; ++i)
      emit_pair(*mesh, kernel, rule, tasks[i].first, tasks[i].second, near_diag_levels,
                chunks[static_cast<std::size_t>(t)]);
  };
  if (nthreads == 1) {
    run_chunk(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(run_chunk, t);
    for (auto& th : pool) th.join();
  }

  std::size_t total = 0, ptotal = 0;
  for (const Buffers& b : chunks) {
    total += b.weight.size();
    ptotal += b.panels.size();
  }
  quad->cell_x.reserve(total);
  quad->cell_xp.reserve(total);
  quad->theta_x.reserve(total);
  quad->theta_xp.reserve(total);
  quad->weight.reserve(total);
  quad->bare_weight.reserve(total);
  quad->kval.reserve(total);
  quad->panels.reserve(ptotal);
  for (Buffers& b : chunks) {
    quad->cell_x.insert(quad->cell_x.end(), b.cell_x.begin(), b.cell_x.end());
    quad->cell_xp.insert(quad->cell_xp.end(), b.cell_xp.begin(), b.cell_xp.end());
    quad->theta_x.insert(quad->theta_x.end(), b.theta_x.begin(), b.theta_x.end());
    quad->theta_xp.insert(quad->theta_xp.end(), b.theta_xp.begin(), b.theta_xp.end());
    quad->weight.insert(quad->weight.end(), b.weight.begin(), b.weight.end());
    quad->bare_weight.insert(quad->bare_weight.end(), b.bare_weight.begin(), b.bare_weight.end());
    quad->kval.insert(quad->kval.end(), b.kval.begin(), b.kval.end());
    quad->panels.insert(quad->panels.end(), b.panels.begin(), b.panels.end());
  }

  // Worst band spans [w, 2w]: mapped to [-1, 1] the kernel singularity sits
  // at -3, on the Bernstein ellipse rho = 3 + 2 sqrt(2).
  double rho = 3.0 + 2.0 * std::sqrt(2.0);
  quad->declared_panel_tol = 50.0 * std::pow(rho, -2.0 * gauss_order) + 5e-15;
  return quad;
}

}  // namespace nlplap
