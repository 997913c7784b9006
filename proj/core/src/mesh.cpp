#include "nlplap/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nlplap/gauss.hpp"
#include "nlplap/summation.hpp"

namespace nlplap {

std::vector<int> Mesh::interior_nodes() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(n_interior()));
  for (int i = 0; i < n_nodes(); ++i)
    if (is_interior_node(i)) out.push_back(i);
  return out;
}

std::vector<int> Mesh::collar_nodes() const {
  std::vector<int> out;
  for (int i = 0; i < n_nodes(); ++i)
    if (!is_interior_node(i)) out.push_back(i);
  return out;
}

MeshPtr build_mesh(Interval omega, int n_cells, const Kernel& kernel) {
  check_kernel_params(kernel);
  if (!(omega.b > omega.a)) throw std::invalid_argument("build_mesh: empty interval");
  if (n_cells < 2) throw std::invalid_argument("build_mesh: need at least 2 cells");
  if (kernel.delta > 10.0 * omega.length())
    throw std::invalid_argument("build_mesh: horizon exceeds 10x the domain, collar would dominate");

  auto mesh = std::make_shared<Mesh>();
  mesh->omega = omega;
  mesh->n_cells = n_cells;
  mesh->spacing = omega.length() / n_cells;
  // Smallest whole number of cells covering the horizon; the small slack
  // keeps an exact multiple from rounding up one extra cell.
  mesh->collar_cells = static_cast<int>(std::ceil(kernel.delta / mesh->spacing - 1e-12));
  mesh->collar_width = mesh->collar_cells * mesh->spacing;

  int n_total = n_cells + 2 * mesh->collar_cells;
  mesh->nodes.resize(static_cast<std::size_t>(n_total) + 1);
  for (int i = 0; i <= n_total; ++i)
    mesh->nodes[static_cast<std::size_t>(i)] = omega.a + (i - mesh->collar_cells) * mesh->spacing;
  return mesh;
}

DiscreteFunction DiscreteFunction::zeros(MeshPtr mesh) {
  DiscreteFunction f;
  f.mesh_ = std::move(mesh);
  f.values_.assign(static_cast<std::size_t>(f.mesh_->n_nodes()), 0.0);
  return f;
}

DiscreteFunction DiscreteFunction::from_node_values(MeshPtr mesh, std::vector<double> values) {
  if (static_cast<int>(values.size()) != mesh->n_nodes())
    throw std::invalid_argument("DiscreteFunction: node value count does not match mesh");
  DiscreteFunction f;
  f.mesh_ = std::move(mesh);
  f.values_ = std::move(values);
  return f;
}

DiscreteFunction DiscreteFunction::constrained(MeshPtr mesh,
                                               const std::vector<double>& interior_values) {
  if (static_cast<int>(interior_values.size()) != mesh->n_interior())
    throw std::invalid_argument("DiscreteFunction: interior value count does not match mesh");
  DiscreteFunction f = zeros(std::move(mesh));
  f.set_interior_values(interior_values);
  return f;
}

bool DiscreteFunction::in_constrained_space() const {
  for (int i = 0; i < mesh_->n_nodes(); ++i)
    if (!mesh_->is_interior_node(i) && values_[static_cast<std::size_t>(i)] != 0.0) return false;
  return true;
}

std::vector<double> DiscreteFunction::interior_values() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(mesh_->n_interior()));
  for (int i = 0; i < mesh_->n_nodes(); ++i)
    if (mesh_->is_interior_node(i)) out.push_back(values_[static_cast<std::size_t>(i)]);
  return out;
}

void DiscreteFunction::set_interior_values(const std::vector<double>& v) {
  if (static_cast<int>(v.size()) != mesh_->n_interior())
    throw std::invalid_argument("set_interior_values: size mismatch");
  int f = mesh_->first_interior();
  for (int i = 0; i < mesh_->n_interior(); ++i)
    values_[static_cast<std::size_t>(f + i)] = v[static_cast<std::size_t>(i)];
}

double DiscreteFunction::operator()(double x) const {
  const Mesh& m = *mesh_;
  if (x <= m.nodes.front() || x >= m.nodes.back()) return 0.0;
  int c = static_cast<int>((x - m.nodes.front()) / m.spacing);
  c = std::min(std::max(c, 0), m.n_total_cells() - 1);
  double t = (x - m.cell_left(c)) / m.spacing;
  return values_[static_cast<std::size_t>(c)] * (1.0 - t) +
         values_[static_cast<std::size_t>(c) + 1] * t;
}

DiscreteFunction subtract(const DiscreteFunction& u, const DiscreteFunction& v) {
  if (u.mesh() != v.mesh())
    throw std::invalid_argument("subtract: functions live on different meshes");
  std::vector<double> d = u.values();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= v.values()[i];
  return DiscreteFunction::from_node_values(u.mesh(), std::move(d));
}

double lp_norm_omega(const DiscreteFunction& u, double p) {
  if (!(p > 1.0)) throw std::domain_error("lp_norm_omega: p must be > 1");
  static const GaussRule rule = gauss_legendre(8);
  const Mesh& m = *u.mesh();
  KahanSum acc;
  double half = 0.5 * m.spacing;
  for (int c = m.first_omega_cell(); c < m.first_omega_cell() + m.n_cells; ++c) {
    double v0 = u.value(c), v1 = u.value(c + 1);
    for (int g = 0; g < rule.order(); ++g) {
      double t = 0.5 * (rule.nodes[static_cast<std::size_t>(g)] + 1.0);
      double val = v0 * (1.0 - t) + v1 * t;
      acc.add(rule.weights[static_cast<std::size_t>(g)] * half * std::pow(std::fabs(val), p));
    }
  }
  return std::pow(acc.value(), 1.0 / p);
}

}  // namespace nlplap
