#include "refugium/mesh.hpp"

#include <fmt/format.h>

#include <cmath>

namespace refugium {

namespace {

// Node index of coordinate `value` on a grid of spacing h, or -1 when the
// coordinate is not on a grid line.
int grid_index(double value, double h) {
  const double r = value / h;
  const double n = std::round(r);
  if (std::abs(r - n) > 1e-9 * std::max(1.0, std::abs(r))) return -1;
  return static_cast<int>(n);
}

void zone_axis(const Interval& iv, double length, double h, int nodes, const char* axis, int& i0, int& i1) {
  if (!(iv.lo < iv.hi)) throw GeometryError(fmt::format("zone {}-range [{}, {}] is empty", axis, iv.lo, iv.hi));
  if (!(iv.lo > 0.0) || !(iv.hi < length))
    throw GeometryError(fmt::format("zone {}-range [{}, {}] is not strictly inside [0, {}]", axis, iv.lo, iv.hi, length));
  i0 = grid_index(iv.lo, h);
  i1 = grid_index(iv.hi, h);
  if (i0 < 0 || i1 < 0)
    throw GeometryError(fmt::format("zone {}-range [{}, {}] is not aligned with the grid (h = {})", axis, iv.lo, iv.hi, h));
  if (i0 < 1 || i1 > nodes - 2 || i0 >= i1)
    throw GeometryError(fmt::format("zone {}-range [{}, {}] does not leave a grid cell to the boundary", axis, iv.lo, iv.hi));
}

}  // namespace

Mesh::Mesh(const DomainSpec& spec) : spec_(spec) {
  if (spec.dimension != 1 && spec.dimension != 2)
    throw GeometryError(fmt::format("dimension must be 1 or 2, got {}", spec.dimension));
  if (spec.resolution < 3) throw GeometryError(fmt::format("resolution must be at least 3, got {}", spec.resolution));
  if (!(spec.lx > 0.0) || (spec.dimension == 2 && !(spec.ly > 0.0)))
    throw GeometryError("extent must have positive length");

  nx_ = spec.resolution;
  hx_ = spec.lx / (nx_ - 1);
  if (spec.dimension == 2) {
    ny_ = spec.resolution;
    hy_ = spec.ly / (ny_ - 1);
  }

  if (spec.zone) {
    zone_axis((*spec.zone)[0], spec.lx, hx_, nx_, "x", zx0_, zx1_);
    if (spec.dimension == 2) zone_axis((*spec.zone)[1], spec.ly, hy_, ny_, "y", zy0_, zy1_);
  }

  const int n = node_count();
  tags_.resize(n);
  full_to_omega1_.assign(n, -1);
  for (int node = 0; node < n; ++node) {
    const int i = node % nx_;
    const int j = node / nx_;
    const bool outer = i == 0 || i == nx_ - 1 || (dimension() == 2 && (j == 0 || j == ny_ - 1));
    NodeTag tag = outer ? NodeTag::OuterBoundary : NodeTag::Omega1Interior;
    if (has_zone()) {
      const bool in_x = i >= zx0_ && i <= zx1_;
      const bool in_y = dimension() == 1 || (j >= zy0_ && j <= zy1_);
      if (in_x && in_y) {
        const bool strict_x = i > zx0_ && i < zx1_;
        const bool strict_y = dimension() == 1 || (j > zy0_ && j < zy1_);
        tag = strict_x && strict_y ? NodeTag::ZoneInterior : NodeTag::Interface;
      }
    }
    tags_[node] = tag;
    if (tag != NodeTag::ZoneInterior) {
      full_to_omega1_[node] = static_cast<int>(omega1_to_full_.size());
      omega1_to_full_.push_back(node);
    }
  }

  const double cell = dimension() == 2 ? hx_ * hy_ : hx_;
  for (int j = 0; j < cell_count_y(); ++j)
    for (int i = 0; i < cell_count_x(); ++i) {
      measure_omega_ += cell;
      if (cell_in_zone(i, j)) measure_zone_ += cell;
    }
}

bool Mesh::cell_in_zone(int i, int j) const {
  if (!has_zone()) return false;
  const bool in_x = i >= zx0_ && i + 1 <= zx1_;
  const bool in_y = dimension() == 1 || (j >= zy0_ && j + 1 <= zy1_);
  return in_x && in_y;
}

Mesh build_mesh(const DomainSpec& spec) { return Mesh(spec); }

Field Operator::apply(const Field& f) const {
  if (f.size() != size()) throw GeometryError("operator applied to a field of the wrong size");
  return (stiffness * f).cwiseQuotient(mass);
}

double Operator::dirichlet_energy(const Field& f) const {
  double sum = 0.0;
  for (const Edge& e : edges) {
    const double d = f[e.i] - f[e.j];
    sum += e.weight * d * d;
  }
  return sum;
}

Operator neumann_laplacian(const Mesh& mesh, Region region, bool zoneless_fallback) {
  if (region == Region::Omega1 && !mesh.has_zone() && !zoneless_fallback)
    throw GeometryError("Omega_1 operator requested on a mesh without a protection zone");

  Operator op;
  op.region = region;
  const int n = mesh.region_size(region);
  op.mass = Field::Zero(n);

  // Local index of a full-grid node in this region.
  auto local = [&](int node) { return region == Region::Omega ? node : mesh.omega1_index(node); };
  auto include_cell = [&](int i, int j) { return region == Region::Omega || !mesh.cell_in_zone(i, j); };

  // Each cell contributes half its transverse width to each edge it touches;
  // coincident edge contributions are merged below.
  std::vector<Eigen::Triplet<double>> triplets;
  auto add_edge = [&](int a, int b, double w) {
    const int la = local(a);
    const int lb = local(b);
    triplets.emplace_back(la, lb, -w);
    triplets.emplace_back(lb, la, -w);
    triplets.emplace_back(la, la, w);
    triplets.emplace_back(lb, lb, w);
  };

  const int nx = mesh.nx();
  if (mesh.dimension() == 1) {
    const double h = mesh.hx();
    for (int i = 0; i < nx - 1; ++i) {
      if (!include_cell(i, 0)) continue;
      add_edge(i, i + 1, 1.0 / h);
      op.mass[local(i)] += 0.5 * h;
      op.mass[local(i + 1)] += 0.5 * h;
    }
  } else {
    const double hx = mesh.hx();
    const double hy = mesh.hy();
    const double wx = 0.5 * hy / hx;
    const double wy = 0.5 * hx / hy;
    const double quarter = 0.25 * hx * hy;
    for (int j = 0; j < mesh.ny() - 1; ++j)
      for (int i = 0; i < nx - 1; ++i) {
        if (!include_cell(i, j)) continue;
        const int n00 = j * nx + i;
        const int n10 = n00 + 1;
        const int n01 = n00 + nx;
        const int n11 = n01 + 1;
        add_edge(n00, n10, wx);
        add_edge(n01, n11, wx);
        add_edge(n00, n01, wy);
        add_edge(n10, n11, wy);
        for (int c : {n00, n10, n01, n11}) op.mass[local(c)] += quarter;
      }
  }

  op.stiffness.resize(n, n);
  op.stiffness.setFromTriplets(triplets.begin(), triplets.end());
  op.stiffness.makeCompressed();

  // Merged edge list from the strictly lower triangle.
  for (int col = 0; col < op.stiffness.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(op.stiffness, col); it; ++it)
      if (it.row() > it.col()) op.edges.push_back({static_cast<int>(it.row()), static_cast<int>(it.col()), -it.value()});

  for (int k = 0; k < n; ++k)
    if (!(op.mass[k] > 0.0)) throw GeometryError("region has a node with no adjacent cell");
  return op;
}

Field predation_field(const Mesh& mesh, double a) {
  if (!(a >= 0.0)) throw ParameterError(fmt::format("predation rate must be nonnegative, got {}", a));
  Field f(mesh.node_count());
  for (int node = 0; node < mesh.node_count(); ++node) {
    const NodeTag t = mesh.tag(node);
    f[node] = (t == NodeTag::ZoneInterior || t == NodeTag::Interface) ? 0.0 : a;
  }
  return f;
}

Field restrict_to_omega1(const Mesh& mesh, const Field& on_omega) {
  if (on_omega.size() != mesh.node_count())
    throw GeometryError(fmt::format("restrict: expected {} nodes, got {}", mesh.node_count(), on_omega.size()));
  Field r(mesh.omega1_count());
  for (int s = 0; s < mesh.omega1_count(); ++s) r[s] = on_omega[mesh.omega1_node(s)];
  return r;
}

Field extend_from_omega1(const Mesh& mesh, const Field& on_omega1, double fill) {
  if (on_omega1.size() != mesh.omega1_count())
    throw GeometryError(fmt::format("extend: expected {} nodes, got {}", mesh.omega1_count(), on_omega1.size()));
  Field f = Field::Constant(mesh.node_count(), fill);
  for (int s = 0; s < mesh.omega1_count(); ++s) f[mesh.omega1_node(s)] = on_omega1[s];
  return f;
}

}  // namespace refugium
