#pragma once

#include "refugium/common.hpp"

#include <Eigen/SparseCore>

#include <array>
#include <optional>
#include <vector>

namespace refugium {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

/// Habitat geometry: an interval [0,lx] or rectangle [0,lx]x[0,ly] with an
/// optional grid-aligned protection zone strictly inside it.
struct DomainSpec {
  int dimension = 1;
  double lx = 1.0;
  double ly = 1.0;  // ignored in 1D
  /// zone[0] is the x-range, zone[1] the y-range (ignored in 1D).
  std::optional<std::array<Interval, 2>> zone;
  int resolution = 201;  // nodes per axis
};

enum class NodeTag { ZoneInterior, Interface, Omega1Interior, OuterBoundary };

enum class Region { Omega, Omega1 };

/// Structured vertex-centred grid. Node index is j*nx + i (x fastest).
/// Immutable after construction.
class Mesh {
 public:
  explicit Mesh(const DomainSpec& spec);

  const DomainSpec& spec() const { return spec_; }
  int dimension() const { return spec_.dimension; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }
  int node_count() const { return nx_ * ny_; }
  bool has_zone() const { return spec_.zone.has_value(); }

  double x(int node) const { return (node % nx_) * hx_; }
  double y(int node) const { return dimension() == 2 ? (node / nx_) * hy_ : 0.0; }
  NodeTag tag(int node) const { return tags_[node]; }

  double measure_omega() const { return measure_omega_; }
  double measure_zone() const { return measure_zone_; }
  double measure_omega1() const { return measure_omega_ - measure_zone_; }

  /// Whether the grid cell with lower-left node (i, j) lies in the closed zone.
  bool cell_in_zone(int i, int j) const;
  int cell_count_x() const { return nx_ - 1; }
  int cell_count_y() const { return dimension() == 2 ? ny_ - 1 : 1; }

  /// Number of nodes carrying a predator unknown (all but zone-interior nodes).
  int omega1_count() const { return static_cast<int>(omega1_to_full_.size()); }
  /// Full-grid index of Omega_1 node s.
  int omega1_node(int s) const { return omega1_to_full_[s]; }
  /// Omega_1 index of full-grid node, or -1 for nodes strictly inside the zone.
  int omega1_index(int node) const { return full_to_omega1_[node]; }

  int region_size(Region r) const { return r == Region::Omega ? node_count() : omega1_count(); }

 private:
  DomainSpec spec_;
  int nx_ = 0;
  int ny_ = 1;
  double hx_ = 0.0;
  double hy_ = 1.0;
  // zone as node-index box [zx0, zx1] x [zy0, zy1]
  int zx0_ = 0, zx1_ = -1, zy0_ = 0, zy1_ = -1;
  std::vector<NodeTag> tags_;
  std::vector<int> omega1_to_full_;
  std::vector<int> full_to_omega1_;
  double measure_omega_ = 0.0;
  double measure_zone_ = 0.0;
};

/// One term w*(f_i - f_j)^2 of the discrete Dirichlet form.
struct Edge {
  int i;
  int j;
  double weight;
};

/// Discrete Neumann -Laplacian on a region in mass-weighted form:
/// -Delta_h = M^{-1} K with K symmetric, nonpositive off the diagonal and
/// zero row sums, and M the lumped (cell trapezoid) mass. M^{-1}K is the
/// ghost-node reflection stencil.
struct Operator {
  Region region = Region::Omega;
  Eigen::SparseMatrix<double> stiffness;
  Field mass;
  std::vector<Edge> edges;

  int size() const { return static_cast<int>(mass.size()); }
  /// Applies -Delta_h.
  Field apply(const Field& f) const;
  /// sum_edges w (f_i - f_j)^2, the discrete integral of |grad f|^2.
  double dirichlet_energy(const Field& f) const;
  /// Lumped-mass quadrature of f*g over the region.
  double integrate(const Field& f, const Field& g) const { return (mass.array() * f.array() * g.array()).sum(); }
  double integrate(const Field& f) const { return mass.dot(f); }
};

Mesh build_mesh(const DomainSpec& spec);

/// Assembles the operator for `region`. On a mesh without a zone Omega_1 is
/// all of Omega; `zoneless_fallback=false` turns that into an error.
Operator neumann_laplacian(const Mesh& mesh, Region region, bool zoneless_fallback = true);

/// a(x): zero on the closed zone, `a` on the rest of Omega.
Field predation_field(const Mesh& mesh, double a);

Field restrict_to_omega1(const Mesh& mesh, const Field& on_omega);
Field extend_from_omega1(const Mesh& mesh, const Field& on_omega1, double fill);

/// Node-wise minimum / maximum helpers used across the solvers.
inline double min_of(const Field& f) { return f.size() ? f.minCoeff() : 0.0; }
inline double max_of(const Field& f) { return f.size() ? f.maxCoeff() : 0.0; }

}  // namespace refugium
