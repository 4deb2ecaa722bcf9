#include "helpers.hpp"

#include "refugium/stability.hpp"
#include "refugium/sweep.hpp"
#include "refugium/thresholds.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

using namespace refugium;

namespace {

SteadyState prey_only(const CoupledModel& m) {
  SteadyState s;
  s.u = Field::Constant(m.nu(), m.params().theta);
  s.v = Field::Zero(m.nv());
  s.converged = true;
  return s;
}

}  // namespace

TEST_SUITE("stability") {

TEST_CASE("linearized matrix equals the steady-state Jacobian") {
  std::mt19937_64 rng(2);
  const Mesh mesh(testing::line(21));
  const CoupledModel model(mesh, testing::base());
  SteadyState s;
  s.u = testing::random_field(model.nu(), rng, 0.1, 1.0);
  s.v = testing::random_field(model.nv(), rng, 0.1, 1.0);
  const Eigen::MatrixXd a(linearized_matrix(linearize(model, s)));
  const Eigen::MatrixXd j(model.jacobian(s.u, s.v));
  CHECK((a - j).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("prey-only state: eta = min(theta, -(mu + c theta/(1 + m theta)))") {
  for (const DomainSpec& d : {testing::line(101), testing::square(21)}) {
    const Mesh mesh(d);
    for (double mu : {-1.1, -0.2, 1.0}) {
      ParamSet p = testing::base();
      p.mu = mu;
      const CoupledModel model(mesh, p);
      const StabilityVerdict sv = principal_eta(linearize(model, prey_only(model)));
      const double expected = std::min(p.theta, -(mu + p.c * p.theta / (1.0 + p.m * p.theta)));
      CHECK(sv.eta_re == doctest::Approx(expected).epsilon(1e-8));
      CHECK(std::abs(sv.eta_im) < 1e-8);
      CHECK(sv.verdict == (expected > 0 ? Verdict::Stable : Verdict::Unstable));
    }
  }
}

TEST_CASE("iterative and dense answers agree at a coexistence state") {
  const Mesh mesh(testing::line(101));
  ParamSet p = testing::base();
  p.theta = 1.2;
  const CoupledModel model(mesh, p);
  const SteadyState s = settle(model, Field::Constant(model.nu(), 0.6), Field::Constant(model.nv(), 1.0), {}).state;
  REQUIRE(s.converged);
  const LinearizedSystem sys = linearize(model, s);
  EtaOptions iterative;
  iterative.dense_check = false;
  const StabilityVerdict a = principal_eta(sys, iterative);
  const Eigen::MatrixXd dense(linearized_matrix(sys));
  const Eigen::VectorXcd ev = dense.eigenvalues();
  double smallest = INFINITY;
  for (int i = 0; i < ev.size(); ++i) smallest = std::min(smallest, ev[i].real());
  CHECK(a.eta_re == doctest::Approx(smallest).epsilon(1e-8));
  CHECK(a.verdict == Verdict::Stable);
}

TEST_CASE("eta_star: eigenvalue and integral ratio agree") {
  const Mesh mesh(testing::line(101));
  ParamSet p = testing::base();
  p.theta = theta1(p, mesh) + 0.5;
  const EtaStar e = eta_star(mesh, p);
  CHECK(e.eigen_value > 0.0);
  CHECK(std::abs(e.eigen_value - e.integral_ratio) < 1e-6);
  CHECK(e.limit_prey.minCoeff() > 0.0);
  p.theta = theta1(p, mesh) - 0.1;
  CHECK_THROWS_AS(eta_star(mesh, p), ParameterError);
}

TEST_CASE("names and errors") {
  CHECK(verdict_name(Verdict::Marginal) == "marginal");
  CHECK_THROWS_AS(principal_eta(LinearizedSystem{}), Error);
  const Mesh mesh(testing::line(21));
  const CoupledModel model(mesh, testing::base());
  SteadyState s;
  s.u = Field::Ones(3);
  s.v = Field::Ones(model.nv());
  CHECK_THROWS_AS(linearize(model, s), GeometryError);
}

}
