#include "helpers.hpp"

#include "refugium/sweep.hpp"
#include "refugium/thresholds.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>

using namespace refugium;

namespace {

BranchPoint point(double theta, OutcomeLabel o, double min_u, double min_v) {
  BranchPoint bp;
  bp.parameter = theta;
  bp.outcome = o;
  bp.min_u = min_u;
  bp.min_v = min_v;
  bp.ok = true;
  return bp;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  return out;
}

}  // namespace

TEST_SUITE("sweep") {

TEST_CASE("detector: linear extrapolation inside the bracket") {
  std::vector<BranchPoint> pts;
  for (double t : {0.1, 0.2, 0.3}) pts.push_back(point(t, OutcomeLabel::PredatorOnly, 0.0, 1.0));
  for (double t : {0.4, 0.5, 0.6}) pts.push_back(point(t, OutcomeLabel::Coexistence, 2.0 * (t - 0.33), 1.0));
  const auto e = detect_bifurcation(pts);
  REQUIRE(e);
  CHECK(e->theta_hat == doctest::Approx(0.33));
  CHECK(e->bracket_lo == doctest::Approx(0.3));
  CHECK(e->bracket_hi == doctest::Approx(0.4));

  // The estimate never leaves the bracket.
  pts[3].min_u = 1.0;
  pts[4].min_u = 1.01;
  const auto clamped = detect_bifurcation(pts);
  REQUIRE(clamped);
  CHECK(clamped->theta_hat >= 0.3);
  CHECK(clamped->theta_hat <= 0.4);
}

TEST_CASE("detector: prey-only side uses min v; descending order") {
  std::vector<BranchPoint> pts;
  for (double t : {0.9, 0.8, 0.7}) pts.push_back(point(t, OutcomeLabel::Coexistence, 0.5, 3.0 * (t - 0.65)));
  for (double t : {0.6, 0.5}) pts.push_back(point(t, OutcomeLabel::PreyOnly, 0.5, 0.0));
  const auto e = detect_bifurcation(pts);
  REQUIRE(e);
  CHECK(e->theta_hat == doctest::Approx(0.65));
  CHECK(e->method.find("min v") != std::string::npos);
}

TEST_CASE("detector: nothing to detect") {
  std::vector<BranchPoint> pts;
  for (double t : {0.1, 0.2, 0.3}) pts.push_back(point(t, OutcomeLabel::PreyOnly, 0.5, 0.0));
  CHECK_FALSE(detect_bifurcation(pts));
  CHECK_FALSE(detect_bifurcation({}));
}

TEST_CASE("no predator survival below -c/m") {
  const Mesh mesh(testing::line(41));
  ParamSet p = testing::base();
  p.mu = -2.0;
  const SweepResult r = sweep_theta(mesh, p, linspace(0.2, 4.0, 6), {});
  CHECK_FALSE(r.estimate);
  for (const BranchPoint& bp : r.points) {
    CHECK(bp.ok);
    CHECK(bp.outcome == OutcomeLabel::PreyOnly);
  }
  CHECK_FALSE(predicted_onset(mesh, p));
}

TEST_CASE("warm-started branch is continuous and within the a priori bounds") {
  const Mesh mesh(testing::line(41));
  ParamSet p = testing::base();
  const double ts = theta_star(p, mesh);
  SweepOptions so;
  so.compute_eta = true;
  const SweepResult r = sweep_theta(mesh, p, linspace(ts + 0.05, ts + 0.35, 9), {}, so);
  CHECK(r.max_jump <= 0.2);
  for (const BranchPoint& bp : r.points) {
    CHECK(bp.ok);
    CHECK(bp.bounds_pass);
    CHECK(bp.outcome == OutcomeLabel::Coexistence);
    CHECK(std::isfinite(bp.eta_re));
    CHECK(bp.min_u == doctest::Approx(min_of(bp.state.u)));
  }
}

TEST_CASE("cold sweeps do not depend on the thread count") {
  const Mesh mesh(testing::line(41));
  const ParamSet p = testing::base();
  const std::vector<double> grid = linspace(0.3, 1.5, 5);
  SweepOptions one;
  one.warm_start = false;
  SweepOptions four = one;
  four.threads = 4;
  const SweepResult a = sweep_theta(mesh, p, grid, {}, one);
  const SweepResult b = sweep_theta(mesh, p, grid, {}, four);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(a.points[i].outcome == b.points[i].outcome);
    CHECK(max_abs(a.points[i].state.u - b.points[i].state.u) == 0.0);
  }
}

TEST_CASE("grid validation") {
  const Mesh mesh(testing::line(21));
  const ParamSet p = testing::base();
  CHECK_THROWS_AS(sweep_theta(mesh, p, {}, {}), ParameterError);
  CHECK_THROWS_AS(sweep_theta(mesh, p, {0.5, 0.7, 0.6}, {}), ParameterError);
  CHECK_THROWS_AS(sweep_theta(mesh, p, {-0.5, 0.7}, {}), ParameterError);
}

TEST_CASE("zone study: nested zones lower theta_star") {
  ParamSet p = testing::base();
  const ZoneStudy z = zone_study(testing::line(101), {0.01, 0.1, 0.2, 0.3, 0.49}, p, kDefaultEigenTol, 2);
  CHECK(z.strictly_decreasing);
  CHECK(z.no_zone_limit == doctest::Approx(1.0));
  CHECK(z.rows.front().theta_star > 0.95);
  CHECK(z.rows.back().theta_star < 0.05);
  const ZoneStudy bad = zone_study(testing::line(101), {0.013}, p);
  CHECK_FALSE(bad.rows.front().ok);
  CHECK_THROWS_AS(zone_study(testing::line(101), {0.2, 0.1}, p), ParameterError);
}

TEST_CASE("asymptotic table") {
  const Mesh mesh(testing::line(41));
  ParamSet p = testing::base();
  p.theta = theta1(p, mesh) + 0.5;
  const AsymptoticResult r = asymptotic_mu(mesh, p, {8, 16, 32}, {}, 3, 99, 2);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    CHECK_FALSE(r.rows[i].flagged);
    CHECK(r.rows[i].multistart_spread < 1e-6);
    if (i > 0) {
      CHECK(r.rows[i].e_u < r.rows[i - 1].e_u);
      CHECK(r.rows[i].e_v < r.rows[i - 1].e_v);
    }
  }
  p.theta = 0.5;
  CHECK_THROWS_AS(asymptotic_mu(mesh, p, {8}, {}), ParameterError);
}

TEST_CASE("multistart initial data") {
  const Mesh mesh(testing::line(33));
  const CoupledModel model(mesh, testing::base());
  for (int i = 0; i < 4; ++i) {
    const auto [u1, v1] = multistart_initial(model, i, 42);
    const auto [u2, v2] = multistart_initial(model, i, 42);
    CHECK(u1 == u2);
    CHECK(v1 == v2);
    CHECK(u1.minCoeff() > 0.0);
    CHECK(v1.minCoeff() > 0.0);
  }
  CHECK(multistart_initial(model, 2, 1).first != multistart_initial(model, 2, 2).first);
}

TEST_CASE("parallel_for") {
  std::vector<std::atomic<int>> hits(50);
  parallel_for(50, 4, [&](int i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(5, 3, [](int i) {
                    if (i == 2) throw ParameterError("boom");
                  }),
                  ParameterError);
}

}
