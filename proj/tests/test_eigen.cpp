#include "helpers.hpp"

#include "refugium/eigenpair.hpp"
#include "refugium/linsolve.hpp"

#include <doctest.h>

#include <cmath>

using namespace refugium;

TEST_SUITE("eigen") {

TEST_CASE("constant potentials") {
  for (const DomainSpec& d : {testing::line(201), testing::square(41)}) {
    const Mesh mesh(d);
    const Operator op = neumann_laplacian(mesh, Region::Omega);
    const EigenPair zero = principal_eigenpair(op, Field::Zero(op.size()));
    CHECK(std::abs(zero.value) <= 1e-10);
    CHECK(zero.strictly_positive);
    CHECK(op.integrate(zero.vector, zero.vector) == doctest::Approx(1.0));
    const EigenPair c = principal_eigenpair(op, Field::Constant(op.size(), -2.5));
    CHECK(std::abs(c.value + 2.5) <= 1e-10);
  }
}

TEST_CASE("matches the dense oracle on random potentials") {
  std::mt19937_64 rng(11);
  const Mesh mesh(testing::line(161));
  const Operator op = neumann_laplacian(mesh, Region::Omega);
  for (int trial = 0; trial < 5; ++trial) {
    const Field q = testing::random_field(op.size(), rng, -3.0, 5.0);
    const double d = 0.2 + trial * 0.4;
    const EigenPair e = principal_eigenpair(op, q, 1e-12, d);
    const double dense = dense_spectrum_oracle(op, q, d).front();
    CHECK(std::abs(e.value - dense) < 1e-8);
    CHECK(e.vector.minCoeff() > 0.0);
  }
}

TEST_CASE("eigenpair satisfies its equation") {
  const Mesh mesh(testing::square(21));
  const Operator op = neumann_laplacian(mesh, Region::Omega);
  const Field q = predation_field(mesh, 1.5);
  const EigenPair e = principal_eigenpair(op, q, 1e-13);
  const Field r = op.apply(e.vector) + q.cwiseProduct(e.vector) - e.value * e.vector;
  CHECK(max_abs(r) < 1e-5 * max_abs(e.vector));
}

TEST_CASE("monotone and 1-Lipschitz in the potential") {
  std::mt19937_64 rng(5);
  const Mesh mesh(testing::line(81));
  const Operator op = neumann_laplacian(mesh, Region::Omega);
  for (int trial = 0; trial < 10; ++trial) {
    const Field q1 = testing::random_field(op.size(), rng, 0.0, 3.0);
    const Field bump = testing::random_field(op.size(), rng, 0.0, 1.0);
    const Field q2 = q1 + bump;
    const double l1 = principal_eigenpair(op, q1).value;
    const double l2 = principal_eigenpair(op, q2).value;
    CHECK(l1 <= l2 + 1e-10);
    CHECK(l2 - l1 <= max_abs(bump) + 1e-10);
    CHECK(l2 - l1 >= bump.minCoeff() - 1e-10);
  }
}

TEST_CASE("Rayleigh quotient is bounded below by the principal eigenvalue") {
  std::mt19937_64 rng(9);
  const Mesh mesh(testing::line(61));
  const Operator op = neumann_laplacian(mesh, Region::Omega);
  const Field q = predation_field(mesh, 2.0);
  const EigenPair e = principal_eigenpair(op, q);
  CHECK(rayleigh(op, q, e.vector) == doctest::Approx(e.value).epsilon(1e-9));
  for (int trial = 0; trial < 20; ++trial) {
    const Field f = testing::random_field(op.size(), rng, -1.0, 1.0);
    CHECK(rayleigh(op, q, f) >= e.value - 1e-12);
  }
  CHECK_THROWS_AS(rayleigh(op, q, Field::Zero(op.size())), Error);
}

TEST_CASE("disconnected Omega_1 in 1D") {
  const Mesh mesh(testing::line(101));
  const Operator op = neumann_laplacian(mesh, Region::Omega1);
  const EigenPair e = principal_eigenpair(op, Field::Zero(op.size()));
  CHECK(std::abs(e.value) < 1e-10);
}

TEST_CASE("errors") {
  const Mesh mesh(testing::line(21));
  const Operator op = neumann_laplacian(mesh, Region::Omega);
  CHECK_THROWS_AS(principal_eigenpair(op, Field::Zero(3)), GeometryError);
  CHECK_THROWS_AS(principal_eigenpair(op, Field::Zero(op.size()), 0.0), Error);
  Field bad = Field::Zero(op.size());
  bad[2] = NAN;
  CHECK_THROWS_AS(principal_eigenpair(op, bad), Error);
}

}
