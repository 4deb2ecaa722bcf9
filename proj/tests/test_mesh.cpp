#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace refugium;

TEST_SUITE("mesh") {

TEST_CASE("node tags and measures in 1D") {
  const Mesh mesh(testing::line(201));
  CHECK(mesh.node_count() == 201);
  CHECK(mesh.hx() == doctest::Approx(0.005));
  int zone = 0, iface = 0, outer = 0;
  for (int i = 0; i < mesh.node_count(); ++i) {
    zone += mesh.tag(i) == NodeTag::ZoneInterior;
    iface += mesh.tag(i) == NodeTag::Interface;
    outer += mesh.tag(i) == NodeTag::OuterBoundary;
  }
  CHECK(zone == 99);
  CHECK(iface == 2);
  CHECK(outer == 2);
  CHECK(mesh.omega1_count() == 102);
  CHECK(mesh.measure_omega() == doctest::Approx(1.0));
  CHECK(mesh.measure_zone() == doctest::Approx(0.5));
  CHECK(mesh.measure_omega1() == doctest::Approx(0.5));
  for (int s = 0; s < mesh.omega1_count(); ++s) CHECK(mesh.omega1_index(mesh.omega1_node(s)) == s);
}

TEST_CASE("2D tags") {
  const Mesh mesh(testing::square(41));
  CHECK(mesh.node_count() == 41 * 41);
  CHECK(mesh.measure_zone() == doctest::Approx(0.25));
  // 19 x 19 zone-interior nodes, 80 on the interface ring.
  int zone = 0, iface = 0;
  for (int i = 0; i < mesh.node_count(); ++i) {
    zone += mesh.tag(i) == NodeTag::ZoneInterior;
    iface += mesh.tag(i) == NodeTag::Interface;
  }
  CHECK(zone == 19 * 19);
  CHECK(iface == 80);
  CHECK(mesh.omega1_count() == 41 * 41 - 19 * 19);
}

TEST_CASE("geometry errors") {
  CHECK_THROWS_AS(Mesh(testing::line(201, 0.0, 0.5)), GeometryError);
  CHECK_THROWS_AS(Mesh(testing::line(201, 0.5, 1.0)), GeometryError);
  CHECK_THROWS_AS(Mesh(testing::line(201, 0.2501, 0.75)), GeometryError);
  CHECK_THROWS_AS(Mesh(testing::line(201, 0.6, 0.4)), GeometryError);
  CHECK_THROWS_AS(Mesh(testing::line(2)), GeometryError);
  CHECK_NOTHROW(Mesh(testing::line(201, 0.005, 0.995)));
  DomainSpec d = testing::square(41);
  (*d.zone)[1] = Interval{0.3, 1.0};
  CHECK_THROWS_AS(Mesh{d}, GeometryError);
}

TEST_CASE("stiffness is symmetric with zero row sums and a nonnegative form") {
  std::mt19937_64 rng(7);
  for (const DomainSpec& d : {testing::line(41), testing::square(21)}) {
    const Mesh mesh(d);
    for (Region r : {Region::Omega, Region::Omega1}) {
      const Operator op = neumann_laplacian(mesh, r);
      const Eigen::MatrixXd k(op.stiffness);
      CHECK((k - k.transpose()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((k * Eigen::VectorXd::Ones(k.rows())).cwiseAbs().maxCoeff() < 1e-10);
      for (int i = 0; i < k.rows(); ++i)
        for (int j = 0; j < k.cols(); ++j)
          if (i != j) CHECK(k(i, j) <= 0.0);
      const double area = r == Region::Omega ? mesh.measure_omega() : mesh.measure_omega1();
      CHECK(op.mass.sum() == doctest::Approx(area));
      for (int trial = 0; trial < 20; ++trial) {
        const Field f = testing::random_field(op.size(), rng, -1.0, 1.0);
        const double form = f.dot(op.stiffness * f);
        CHECK(form >= -1e-12);
        CHECK(form == doctest::Approx(op.dirichlet_energy(f)).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("the Omega_1 operator has no edge across the zone") {
  const Mesh mesh(testing::square(21));
  const Operator op = neumann_laplacian(mesh, Region::Omega1);
  for (const Edge& e : op.edges) {
    const int a = mesh.omega1_node(e.i);
    const int b = mesh.omega1_node(e.j);
    const bool both_iface = mesh.tag(a) == NodeTag::Interface && mesh.tag(b) == NodeTag::Interface;
    if (!both_iface) continue;
    // An interface-to-interface edge must run along the zone boundary.
    const double mx = 0.5 * (mesh.x(a) + mesh.x(b));
    const double my = 0.5 * (mesh.y(a) + mesh.y(b));
    const bool inside = mx > 0.25 + 1e-12 && mx < 0.75 - 1e-12 && my > 0.25 + 1e-12 && my < 0.75 - 1e-12;
    CHECK_FALSE(inside);
  }
}

TEST_CASE("stencil is exact on quadratics away from the far boundary") {
  const Mesh mesh(testing::bare_line(41));
  const Operator op = neumann_laplacian(mesh, Region::Omega);
  Field f(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) f[i] = mesh.x(i) * mesh.x(i);
  const Field lap = op.apply(f);
  for (int i = 0; i < mesh.node_count() - 1; ++i) CHECK(lap[i] == doctest::Approx(-2.0).epsilon(1e-9));
}

TEST_CASE("Neumann eigenfunction cos(pi x) converges at second order") {
  double previous = 0.0;
  for (int n : {21, 41, 81, 161}) {
    const Mesh mesh(testing::bare_line(n));
    const Operator op = neumann_laplacian(mesh, Region::Omega);
    Field f(n);
    for (int i = 0; i < n; ++i) f[i] = std::cos(std::numbers::pi * mesh.x(i));
    const Field err = op.apply(f) - std::numbers::pi * std::numbers::pi * f;
    const double e = max_abs(err);
    if (previous > 0.0) CHECK(previous / e == doctest::Approx(4.0).epsilon(0.05));
    previous = e;
  }
}

TEST_CASE("predation field and transfers") {
  const Mesh mesh(testing::line(21));
  const Field a = predation_field(mesh, 2.0);
  for (int i = 0; i < mesh.node_count(); ++i) {
    const double x = mesh.x(i);
    const bool closed_zone = x >= 0.25 - 1e-12 && x <= 0.75 + 1e-12;
    CHECK(a[i] == (closed_zone ? 0.0 : 2.0));
  }
  CHECK_THROWS_AS(predation_field(mesh, -1.0), ParameterError);

  Field u(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) u[i] = i + 1.0;
  const Field r = restrict_to_omega1(mesh, u);
  CHECK(r.size() == mesh.omega1_count());
  const Field back = extend_from_omega1(mesh, r, -5.0);
  for (int i = 0; i < mesh.node_count(); ++i)
    CHECK(back[i] == (mesh.tag(i) == NodeTag::ZoneInterior ? -5.0 : u[i]));
  CHECK_THROWS_AS(restrict_to_omega1(mesh, Field::Zero(3)), GeometryError);
}

TEST_CASE("zoneless Omega_1 fallback") {
  const Mesh mesh(testing::bare_line(9));
  CHECK(mesh.omega1_count() == 9);
  CHECK_NOTHROW(neumann_laplacian(mesh, Region::Omega1));
  CHECK_THROWS_AS(neumann_laplacian(mesh, Region::Omega1, false), GeometryError);
}

}
