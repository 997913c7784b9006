#pragma once

#include <memory>
#include <vector>

#include "nlplap/kernel.hpp"

namespace nlplap {

struct Interval {
  double a = 0.0;
  double b = 1.0;
  double length() const { return b - a; }
};

// Uniform grid on omega = (a, b) extended by a collar of whole cells on each
// side. The collar is the volume on which Dirichlet data lives: it spans at
// least one horizon, so every interaction reaching out of omega lands on
// meshed (and constrained) territory.
//
// Node i sits at a + (i - collar_cells) * spacing. Nodes strictly inside
// omega are "interior"; everything else, including the two endpoints of
// omega, belongs to the collar and is pinned to zero for constrained
// functions.
class Mesh {
 public:
  Interval omega;
  int n_cells = 0;       // cells inside omega
  double spacing = 0.0;  // (b - a) / n_cells
  int collar_cells = 0;  // per side
  double collar_width = 0.0;
  std::vector<double> nodes;

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_total_cells() const { return n_nodes() - 1; }
  double node(int i) const { return nodes[static_cast<std::size_t>(i)]; }
  double cell_left(int c) const { return nodes[static_cast<std::size_t>(c)]; }

  int first_interior() const { return collar_cells + 1; }
  int n_interior() const { return n_cells - 1; }
  bool is_interior_node(int i) const {
    return i > collar_cells && i < collar_cells + n_cells;
  }
  std::vector<int> interior_nodes() const;
  std::vector<int> collar_nodes() const;

  // Cells covering omega itself: [collar_cells, collar_cells + n_cells).
  int first_omega_cell() const { return collar_cells; }
};

using MeshPtr = std::shared_ptr<const Mesh>;

// Builds the mesh for a kernel's horizon. The collar is the smallest whole
// number of cells covering delta per side. Throws std::invalid_argument for
// n_cells < 2, an empty interval, or delta > 10 * |omega| (the collar would
// dwarf the domain).
MeshPtr build_mesh(Interval omega, int n_cells, const Kernel& kernel);

// Piecewise-linear function given by node values on a mesh. "Constrained"
// construction enforces zero on every collar node, i.e. membership in the
// discrete energy space with volume constraint.
class DiscreteFunction {
 public:
  DiscreteFunction() = default;
  static DiscreteFunction zeros(MeshPtr mesh);
  static DiscreteFunction from_node_values(MeshPtr mesh, std::vector<double> values);
  // interior_values has length mesh->n_interior(); collar nodes are zero.
  static DiscreteFunction constrained(MeshPtr mesh, const std::vector<double>& interior_values);

  const MeshPtr& mesh() const { return mesh_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  double value(int i) const { return values_[static_cast<std::size_t>(i)]; }

  bool in_constrained_space() const;
  std::vector<double> interior_values() const;
  void set_interior_values(const std::vector<double>& v);

  // Pointwise evaluation inside the meshed region (linear interpolation).
  double operator()(double x) const;

 private:
  MeshPtr mesh_;
  std::vector<double> values_;
};

DiscreteFunction subtract(const DiscreteFunction& u, const DiscreteFunction& v);

// ||u||_{L^p(omega)} by per-cell Gauss quadrature (exact for p = 2).
double lp_norm_omega(const DiscreteFunction& u, double p);

}  // namespace nlplap
