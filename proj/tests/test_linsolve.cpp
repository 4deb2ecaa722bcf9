#include "helpers.hpp"

#include "refugium/linsolve.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace refugium;

namespace {

Eigen::VectorXd dense_solve(const Operator& op, double d, const Field& q, double shift, const Field& rhs) {
  Eigen::MatrixXd a = d * Eigen::MatrixXd(op.stiffness);
  for (int i = 0; i < op.size(); ++i) a.row(i) /= op.mass[i];
  a.diagonal() += q + Field::Constant(op.size(), shift);
  return a.partialPivLu().solve(rhs);
}

}  // namespace

TEST_SUITE("linsolve") {

TEST_CASE("CG matches a dense solve") {
  std::mt19937_64 rng(3);
  for (const DomainSpec& d : {testing::line(101), testing::square(17)}) {
    const Mesh mesh(d);
    const Operator op = neumann_laplacian(mesh, Region::Omega);
    const Field q = testing::random_field(op.size(), rng, 0.0, 2.0);
    const Field rhs = testing::random_field(op.size(), rng, -1.0, 1.0);
    LinearSystem sys{&op, 0.7, q, 0.1, rhs};
    SolveStats stats;
    const Field x = solve_spd(sys, 1e-12, &stats);
    const Field ref = dense_solve(op, 0.7, q, 0.1, rhs);
    CHECK(max_abs(x - ref) < 1e-9 * std::max(1.0, max_abs(ref)));
    CHECK(stats.iterations > 0);
    CHECK(stats.relative_residual <= 1e-11);

    const SpdFactorization fac(op, 0.7, q, 0.1);
    CHECK(max_abs(fac.solve(rhs) - ref) < 1e-9 * std::max(1.0, max_abs(ref)));
  }
}

TEST_CASE("empty potential means zero") {
  const Mesh mesh(testing::line(41));
  const Operator op = neumann_laplacian(mesh, Region::Omega);
  const Field rhs = Field::Ones(op.size());
  const Field x = solve_spd(LinearSystem{&op, 1.0, Field(), 2.0, rhs});
  CHECK(max_abs(x - Field::Constant(op.size(), 0.5)) < 1e-10);
}

TEST_CASE("indefinite systems are reported as singular") {
  const Mesh mesh(testing::line(41));
  const Operator op = neumann_laplacian(mesh, Region::Omega);
  const Field rhs = Field::Ones(op.size());
  CHECK_THROWS_AS(solve_spd(LinearSystem{&op, 1.0, Field(), -1e6, rhs}), SingularError);
  CHECK_THROWS_AS(solve_spd(LinearSystem{&op, 1.0, Field(), -5.0, rhs}), SingularError);
  CHECK_THROWS_AS(SpdFactorization(op, 1.0, Field(), -1e6), SingularError);
}

TEST_CASE("size mismatches") {
  const Mesh mesh(testing::line(41));
  const Operator op = neumann_laplacian(mesh, Region::Omega);
  CHECK_THROWS_AS(solve_spd(LinearSystem{&op, 1.0, Field::Zero(3), 1.0, Field::Ones(op.size())}), GeometryError);
  CHECK_THROWS_AS(solve_spd(LinearSystem{&op, 1.0, Field(), 1.0, Field::Ones(4)}), GeometryError);
}

TEST_CASE("dense oracle: Neumann spectrum of the unit interval") {
  double previous = 0.0;
  for (int n : {21, 41, 81, 161}) {
    const Mesh mesh(testing::bare_line(n));
    const Operator op = neumann_laplacian(mesh, Region::Omega);
    const std::vector<double> ev = dense_spectrum_oracle(op, Field());
    CHECK(std::is_sorted(ev.begin(), ev.end()));
    CHECK(std::abs(ev[0]) < 1e-9);
    const double e = std::abs(ev[1] - std::numbers::pi * std::numbers::pi);
    if (previous > 0.0) CHECK(previous / e == doctest::Approx(4.0).epsilon(0.05));
    previous = e;
  }
}

TEST_CASE("dense oracle cap") {
  const Mesh mesh(testing::square(49));
  const Operator op = neumann_laplacian(mesh, Region::Omega);
  CHECK_THROWS_AS(dense_spectrum_oracle(op, Field()), Error);
}

}
