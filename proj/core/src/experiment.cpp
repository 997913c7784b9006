#include "nlplap/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace nlplap {

namespace {

double cosine_bump(double x, double center, double halfwidth) {
  double t = (x - center) / halfwidth;
  if (std::fabs(t) >= 1.0) return 0.0;
  double c = std::cos(0.5 * 3.14159265358979323846 * t);
  return c * c;
}

}  // namespace

double TwoPointBump::operator()(double xp, double x) const {
  return cosine_bump(xp, xp_center, xp_halfwidth) * cosine_bump(x, x_center, x_halfwidth);
}

std::vector<TwoPointBump> default_test_functions() {
  return {
      {0.30, 0.05, 0.40, 0.05},
      {0.50, 0.05, 0.60, 0.05},
      {0.66, 0.04, 0.76, 0.04},
  };
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  if (spec.indices.size() < 2)
    throw std::invalid_argument("run_experiment: need at least two sequence indices");
  for (std::size_t i = 0; i < spec.indices.size(); ++i) {
    if (spec.indices[i] < 1)
      throw std::invalid_argument("run_experiment: sequence indices start at 1");
    if (i > 0 && spec.indices[i] <= spec.indices[i - 1])
      throw std::invalid_argument("run_experiment: indices must be strictly increasing");
  }
  if (spec.p != spec.kernel.p)
    throw std::invalid_argument("run_experiment: p does not match the kernel");
  if (spec.test_functions.empty())
    throw std::invalid_argument("run_experiment: need at least one test function");

  MeshPtr mesh = build_mesh(spec.omega, spec.n_cells, spec.kernel);
  QuadraturePtr quad = assemble_quadrature(mesh, spec.kernel, spec.near_diag_levels,
                                           spec.gauss_order, spec.threads);
  Functional f = Functional::density(mesh, spec.f_density);

  CoefficientField h_lim = spec.sequence.weak_star_limit();
  SolveResult lim = solve(quad, h_lim, f, spec.p, spec.solver);
  if (!lim.report.converged)
    throw std::runtime_error("run_experiment: the limit solve did not converge");

  ExperimentReport rep;
  rep.n_flux = static_cast<int>(spec.test_functions.size());
  rep.limit_solution = lim.u;
  std::vector<double> h_lim_v = h_lim.values_on(*quad);
  rep.limit_energy = form_Bh(*quad, h_lim_v, lim.u, lim.u);
  rep.limit_min = lim.report.objective_value;
  rep.limit_converged = true;

  PairField psi_lim = flux(quad, h_lim_v, lim.u);
  std::vector<double> lim_pairings;
  lim_pairings.reserve(spec.test_functions.size());
  for (const TwoPointBump& G : spec.test_functions)
    lim_pairings.push_back(flux_pairing(psi_lim, G));

  for (int j : spec.indices) {
    CoefficientField hj = spec.sequence.member(j);
    std::vector<double> hj_v = hj.values_on(*quad);
    SolveResult rj = solve(quad, hj, f, spec.p, spec.solver);

    ExperimentRow row;
    row.j = j;
    row.converged = rj.report.converged;
    row.wall_time = rj.report.wall_time;
    DiscreteFunction diff = subtract(rj.u, lim.u);
    row.lp_error = lp_norm_omega(diff, spec.p);
    row.x0_error = std::pow(form_Bh(*quad, hj_v, diff, diff), 1.0 / spec.p);
    row.energy_gap = std::fabs(form_Bh(*quad, hj_v, rj.u, rj.u) - rep.limit_energy);
    row.min_gap = std::fabs(rj.report.objective_value - rep.limit_min);
    PairField psi_j = flux(quad, hj_v, rj.u);
    row.flux_gaps.reserve(spec.test_functions.size());
    for (std::size_t g = 0; g < spec.test_functions.size(); ++g)
      row.flux_gaps.push_back(
          std::fabs(flux_pairing(psi_j, spec.test_functions[g]) - lim_pairings[g]));
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

std::string report_to_csv(const ExperimentReport& report) {
  std::string out = "j,lp_error,x0_error,energy_gap,min_gap";
  for (int g = 1; g <= report.n_flux; ++g) out += ",flux_gap_" + std::to_string(g);
  out += ",wall_time\n";
  char buf[40];
  for (const ExperimentRow& r : report.rows) {
    out += std::to_string(r.j);
    auto put = [&](double v) {
      std::snprintf(buf, sizeof buf, ",%.17e", v);
      out += buf;
    };
    put(r.lp_error);
    put(r.x0_error);
    put(r.energy_gap);
    put(r.min_gap);
    for (double fg : r.flux_gaps) put(fg);
    put(r.wall_time);
    out += "\n";
  }
  return out;
}

ExperimentReport report_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("report_from_csv: empty input");

  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream ls(s);
    while (std::getline(ls, cur, ',')) parts.push_back(cur);
    return parts;
  };

  std::vector<std::string> head = split(line);
  const char* fixed[] = {"j", "lp_error", "x0_error", "energy_gap", "min_gap"};
  if (head.size() < 6) throw std::invalid_argument("report_from_csv: short header");
  for (int i = 0; i < 5; ++i)
    if (head[static_cast<std::size_t>(i)] != fixed[i])
      throw std::invalid_argument("report_from_csv: unexpected header column");
  if (head.back() != "wall_time")
    throw std::invalid_argument("report_from_csv: header must end with wall_time");
  int n_flux = static_cast<int>(head.size()) - 6;
  for (int g = 0; g < n_flux; ++g)
    if (head[static_cast<std::size_t>(5 + g)] != "flux_gap_" + std::to_string(g + 1))
      throw std::invalid_argument("report_from_csv: unexpected flux gap column");

  ExperimentReport rep;
  rep.n_flux = n_flux;
  auto num = [](const std::string& s) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
      throw std::invalid_argument("report_from_csv: bad number '" + s + "'");
    return v;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> parts = split(line);
    if (parts.size() != head.size())
      throw std::invalid_argument("report_from_csv: row width does not match header");
    ExperimentRow row;
    row.j = static_cast<int>(std::strtol(parts[0].c_str(), nullptr, 10));
    row.lp_error = num(parts[1]);
    row.x0_error = num(parts[2]);
    row.energy_gap = num(parts[3]);
    row.min_gap = num(parts[4]);
    for (int g = 0; g < n_flux; ++g)
      row.flux_gaps.push_back(num(parts[static_cast<std::size_t>(5 + g)]));
    row.wall_time = num(parts.back());
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

std::string ExperimentReport::to_json() const {
  nlohmann::json j;
  j["n_flux"] = n_flux;
  j["limit_energy"] = limit_energy;
  j["limit_min"] = limit_min;
  j["limit_converged"] = limit_converged;
  if (limit_solution.mesh()) {
    nlohmann::json sol;
    std::vector<double> xs;
    const Mesh& m = *limit_solution.mesh();
    xs.reserve(static_cast<std::size_t>(m.n_nodes()));
    for (int i = 0; i < m.n_nodes(); ++i) xs.push_back(m.node(i));
    sol["x"] = xs;
    sol["u"] = limit_solution.values();
    j["limit_solution"] = sol;
  }
  nlohmann::json rows_json = nlohmann::json::array();
  for (const ExperimentRow& r : rows) {
    nlohmann::json rj;
    rj["j"] = r.j;
    rj["lp_error"] = r.lp_error;
    rj["x0_error"] = r.x0_error;
    rj["energy_gap"] = r.energy_gap;
    rj["min_gap"] = r.min_gap;
    rj["flux_gaps"] = r.flux_gaps;
    rj["wall_time"] = r.wall_time;
    rj["converged"] = r.converged;
    rows_json.push_back(rj);
  }
  j["rows"] = rows_json;
  return j.dump(2);
}

}  // namespace nlplap
