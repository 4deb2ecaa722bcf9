#include "helpers.hpp"

#include "refugium/scalar.hpp"
#include "refugium/thresholds.hpp"

#include <doctest.h>

#include <cmath>

using namespace refugium;

TEST_SUITE("scalar") {

TEST_CASE("constant potential gives the constant solution") {
  const Mesh mesh(testing::bare_line(41));
  const ScalarSolution s = solve_logistic(mesh, 2.0, Field::Constant(41, 0.5));
  CHECK(s.classification == ScalarClass::Positive);
  CHECK(max_abs((s.field.array() - 1.5).matrix()) < 1e-10);
  const ScalarSolution z = solve_logistic(mesh, 0.4, Field::Constant(41, 0.5));
  CHECK(z.classification == ScalarClass::Zero);
  CHECK(max_abs(z.field) == 0.0);
}

TEST_CASE("classification across theta1") {
  const Mesh mesh(testing::line(201));
  const ParamSet p = testing::base();
  const double t1 = theta1(p, mesh);
  const Field q0 = limit_potential(mesh, p);
  const ScalarSolution lo = solve_logistic(mesh, t1 - 0.05, q0);
  CHECK(lo.classification == ScalarClass::Zero);
  const ScalarSolution hi = solve_logistic(mesh, t1 + 0.05, q0);
  REQUIRE(hi.classification == ScalarClass::Positive);
  CHECK(hi.field.minCoeff() > 0.0);
  CHECK(hi.residual <= 1e-9 * std::max(1.0, t1));
  const ScalarSolution sub = solve_logistic(mesh, t1 + 0.05, q0, subsolution_start(mesh, t1 + 0.05, q0));
  CHECK(max_abs(sub.field - hi.field) < 1e-8);
}

TEST_CASE("solution bounded by theta and increasing in theta") {
  const Mesh mesh(testing::square(21));
  const ParamSet p = testing::base();
  const Field q0 = limit_potential(mesh, p);
  Field previous = Field::Zero(mesh.node_count());
  for (double theta : {2.2, 2.6, 3.0}) {
    const ScalarSolution s = solve_logistic(mesh, theta, q0);
    REQUIRE(s.classification == ScalarClass::Positive);
    CHECK(s.field.maxCoeff() <= theta + 1e-9);
    CHECK((s.field - previous).minCoeff() > 0.0);
    CHECK(logistic_residual(neumann_laplacian(mesh, Region::Omega), theta, q0, s.field) <= 1e-8);
    previous = s.field;
  }
}

TEST_CASE("auxiliary problem approaches the limit as mu grows") {
  const Mesh mesh(testing::line(101));
  ParamSet p = testing::base();
  p.theta = theta1(p, mesh) + 0.5;
  const ScalarSolution limit = solve_logistic(mesh, p.theta, limit_potential(mesh, p));
  double previous = INFINITY;
  for (double mu : {10.0, 100.0, 1e4}) {
    p.mu = mu;
    const ScalarSolution aux = solve_aux_mu(mesh, p);
    REQUIRE(aux.classification == ScalarClass::Positive);
    const double gap = max_abs(aux.field - limit.field);
    CHECK(gap < previous);
    previous = gap;
  }
  CHECK(previous < 1e-2);
  p.mu = -1.0;
  CHECK_THROWS_AS(solve_aux_mu(mesh, p), ParameterError);
}

TEST_CASE("errors") {
  const Mesh mesh(testing::line(21));
  CHECK_THROWS_AS(solve_logistic(mesh, 1.0, Field::Zero(3)), GeometryError);
  CHECK_THROWS_AS(solve_logistic(mesh, -1.0, Field::Zero(21)), ParameterError);
  CHECK_THROWS_AS(solve_logistic(mesh, 1.0, Field::Zero(21), Field::Zero(5)), GeometryError);
}

}
