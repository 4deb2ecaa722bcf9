#include "refugium/verify.hpp"

#include "refugium/linsolve.hpp"
#include "refugium/report.hpp"
#include "refugium/scalar.hpp"
#include "refugium/thresholds.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <mutex>

namespace refugium {

bool VerifyReport::all_pass() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.pass; });
}

namespace {

/// A converged state kept for the cross-cutting checks.
struct Collected {
  std::string label;
  const Mesh* mesh;
  ParamSet params;
  SteadyState state;
};

class Checker {
 public:
  Checker(int id, std::string name) {
    result_.id = id;
    result_.name = std::move(name);
    result_.pass = true;
  }

  /// Records `label: value` and whether it met its bound.
  void check(const std::string& label, bool ok, const std::string& value) {
    result_.details.push_back(fmt::format("{} {}: {}", ok ? "ok  " : "FAIL", label, value));
    if (!ok) result_.pass = false;
  }
  void note(const std::string& label, const std::string& value) {
    result_.details.push_back(fmt::format("     {}: {}", label, value));
  }
  void fail(const std::string& why) { check("error", false, why); }

  CriterionResult take() { return std::move(result_); }

 private:
  CriterionResult result_;
};

ParamSet base_params() {
  ParamSet p;
  p.a = 2.0;
  p.k = 1.0;
  p.c = 1.0;
  p.m = 1.0;
  p.mu = 1.0;
  p.theta = 1.0;
  return p;
}

DomainSpec smoke_domain_2d() {
  DomainSpec d;
  d.dimension = 2;
  d.lx = 1.0;
  d.ly = 1.0;
  d.resolution = 41;
  d.zone = std::array<Interval, 2>{Interval{0.25, 0.75}, Interval{0.25, 0.75}};
  return d;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  return out;
}

struct Context {
  const VerifyOptions& options;
  const Mesh& mesh;
  const Mesh& mesh2d;
  SettleOptions settle;
  std::mutex lock;
  std::vector<Collected> collected;

  void keep(std::string label, const Mesh& m, const ParamSet& p, const SteadyState& s) {
    if (!s.converged) return;
    std::lock_guard<std::mutex> guard(lock);
    collected.push_back({std::move(label), &m, p, s});
  }
};

SteadyState settle_from(const Mesh& mesh, const ParamSet& p, const SettleOptions& opts, double u0, double v0) {
  const CoupledModel model(mesh, p);
  return settle(model, Field::Constant(model.nu(), u0), Field::Constant(model.nv(), v0), opts).state;
}

double eps_of(const Context& ctx, const ParamSet& p) {
  return ctx.settle.eps_pos > 0.0 ? ctx.settle.eps_pos : default_eps_pos(p);
}

void eigen_checks(Checker& ck, const Mesh& mesh, const std::string& tag, double tol) {
  const ParamSet p = base_params();
  const Operator op = neumann_laplacian(mesh, Region::Omega);
  const int n = op.size();
  const double zero = principal_eigenpair(op, Field::Zero(n), tol).value;
  ck.check(tag + " lambda1(0) within 1e-10", std::abs(zero) <= 1e-10, num(zero));
  const double c = 3.7;
  const double cval = principal_eigenpair(op, Field::Constant(n, c), tol).value;
  ck.check(tag + " lambda1(3.7) - 3.7 within 1e-10", std::abs(cval - c) <= 1e-10, num(cval - c));
  const Field q0 = limit_potential(mesh, p);
  const double it = principal_eigenpair(op, q0, tol).value;
  const double dense = dense_spectrum_oracle(op, q0).front();
  ck.check(tag + " lambda1(q0) vs dense within 1e-8", std::abs(it - dense) <= 1e-8,
           fmt::format("{} vs {} (gap {})", num(it), num(dense), num(std::abs(it - dense))));
  const Field q = predation_potential(mesh, p);
  const double its = principal_eigenpair(op, q, tol).value;
  const double denses = dense_spectrum_oracle(op, q).front();
  ck.check(tag + " theta_star(mu=1) vs dense within 1e-8", std::abs(its - denses) <= 1e-8,
           fmt::format("{} vs {} (gap {})", num(its), num(denses), num(std::abs(its - denses))));
}

CriterionResult criterion1(Context& ctx) {
  Checker ck(1, "eigenvalue correctness");
  eigen_checks(ck, ctx.mesh, "1D", ctx.options.solver.eigen_tol);
  eigen_checks(ck, ctx.mesh2d, "2D", ctx.options.solver.eigen_tol);
  return ck.take();
}

CriterionResult criterion2(Context& ctx) {
  Checker ck(2, "threshold monotonicity and limits");
  const double tol = ctx.options.solver.eigen_tol;
  ParamSet p = base_params();
  const double th0 = theta0(p);
  const double th1 = theta1(p, ctx.mesh, tol);
  const std::vector<double> mus{0.25, 0.5, 1, 2, 4, 8, 16, 64};
  std::vector<double> ts;
  for (double mu : mus) {
    p.mu = mu;
    ts.push_back(theta_star(p, ctx.mesh, tol));
  }
  bool increasing = true;
  bool below = true;
  std::string row;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i > 0 && !(ts[i] > ts[i - 1])) increasing = false;
    if (!(ts[i] < th0)) below = false;
    row += fmt::format("{}{}", i ? " " : "", num(ts[i]));
  }
  ck.note("theta_star over mu {0.25..64}", row);
  ck.check("theta_star strictly increasing in mu", increasing, increasing ? "yes" : "no");
  ck.check("theta_star < theta0", below, num(th0));
  const double g64 = std::abs(ts.back() - th1);
  const double g8 = std::abs(ts[5] - th1);
  ck.check("|theta_star(64) - theta1| < |theta_star(8) - theta1|", g64 < g8, fmt::format("{} < {}", num(g64), num(g8)));
  const double cap = p.a * ctx.mesh.measure_omega1() / (p.k * ctx.mesh.measure_omega()) + 1e-3;
  ck.check("theta1 <= a|Omega1|/(k|Omega|) + 1e-3", th1 <= cap, fmt::format("{} <= {}", num(th1), num(cap)));

  // Centred zones on the base domain, snapped to the grid.
  const DomainSpec& base = ctx.options.domain;
  const double h = ctx.mesh.hx();
  const double half = 0.5 * base.lx;
  auto snap = [&](double w) { return std::max(1.0, std::round(w / h)) * h; };
  std::vector<double> widths{snap(h), snap(0.1 * half), snap(0.3 * half), snap(0.5 * half), snap(0.8 * half),
                             half - h};
  p.mu = 1.0;
  const ZoneStudy zs = zone_study(base, widths, p, tol, 1);
  std::string zrow;
  bool all_ok = true;
  for (const ZoneRow& r : zs.rows) {
    zrow += fmt::format("{}{}:{}", zrow.empty() ? "" : " ", num(r.half_width), r.ok ? num(r.theta_star) : r.status);
    all_ok = all_ok && r.ok;
  }
  ck.note("zone half-width:theta_star", zrow);
  ck.check("theta_star strictly decreasing over nested zones", all_ok && zs.strictly_decreasing,
           zs.strictly_decreasing ? "yes" : "no");
  if (all_ok) {
    const double small_gap = std::abs(zs.rows.front().theta_star - zs.no_zone_limit) / zs.no_zone_limit;
    ck.check("smallest zone within 5% of a mu/(1+k mu)", small_gap < 0.05, fmt::format("relative gap {}", num(small_gap)));
    const double big = zs.rows.back().theta_star;
    ck.check("largest zone below 0.05 a mu/(1+k mu)", big < 0.05 * zs.no_zone_limit,
             fmt::format("{} < {}", num(big), num(0.05 * zs.no_zone_limit)));
  }
  return ck.take();
}

CriterionResult criterion3(Context& ctx) {
  Checker ck(3, "semitrivial and prey-safe regimes");
  ParamSet p = base_params();
  p.theta = 1.0;
  p.mu = -p.c / p.m - 0.1;
  const SteadyState s1 = settle_from(ctx.mesh, p, ctx.settle, 0.5 * p.theta, 1.0);
  ctx.keep("mu below -c/m", ctx.mesh, p, s1);
  ck.check("mu = -c/m - 0.1 converged", s1.converged, num(s1.residual));
  ck.check("max v < 1e-6", max_of(s1.v) < 1e-6, num(max_of(s1.v)));
  const double du = max_abs((s1.u.array() - p.theta).matrix());
  ck.check("|u - theta| < 1e-6", du < 1e-6, num(du));

  ParamSet q = base_params();
  q.theta = theta0(q) + 0.1;
  q.mu = 5.0;
  const SteadyState s2 = settle_from(ctx.mesh, q, ctx.settle, 0.5 * q.theta, q.mu);
  ctx.keep("theta above theta0", ctx.mesh, q, s2);
  ck.check("theta = theta0 + 0.1 converged", s2.converged, num(s2.residual));
  ck.check("min u > 0.05", min_of(s2.u) > 0.05, num(min_of(s2.u)));
  return ck.take();
}

void record_branch(Context& ctx, const std::string& tag, const ParamSet& p, const SweepResult& r) {
  for (const BranchPoint& bp : r.points) {
    ParamSet q = p;
    q.theta = bp.parameter;
    if (bp.ok) ctx.keep(fmt::format("{} theta={}", tag, num(bp.parameter)), ctx.mesh, q, bp.state);
  }
}

std::string describe(const SweepResult& r) {
  int ok = 0;
  for (const BranchPoint& bp : r.points) ok += bp.ok ? 1 : 0;
  return fmt::format("{}/{} points solved, max jump {}", ok, r.points.size(), num(r.max_jump));
}

CriterionResult criterion4(Context& ctx) {
  Checker ck(4, "coexistence onset at theta_star");
  const double tol = ctx.options.solver.eigen_tol;
  ParamSet p = base_params();
  ck.check("handling condition m <= (1+k mu)^2/(a mu)", handling_condition(p), num(p.m));
  const double ts = theta_star(p, ctx.mesh, tol);
  const double th0 = theta0(p);
  ck.note("theta_star", num(ts));

  ParamSet above = p;
  above.theta = ts + 0.1 * (th0 - ts);
  const SteadyState sa = settle_from(ctx.mesh, above, ctx.settle, 0.5 * above.theta, above.mu);
  ctx.keep("above theta_star", ctx.mesh, above, sa);
  const Outcome oa = classify_outcome(sa, eps_of(ctx, above));
  ck.check("theta_star + 0.1(theta0 - theta_star) coexists", sa.converged && oa.label == OutcomeLabel::Coexistence,
           fmt::format("{} min u {}", outcome_name(oa.label), num(oa.min_u)));
  ck.check("a priori bounds", check_apriori(sa, above, eps_of(ctx, above)).pass(), "checked");

  ParamSet below = p;
  below.theta = 0.95 * ts;
  const SteadyState sb = settle_from(ctx.mesh, below, ctx.settle, 0.5 * below.theta, below.mu);
  ctx.keep("below theta_star", ctx.mesh, below, sb);
  const double eps = eps_of(ctx, below);
  ck.check("0.95 theta_star: max u < eps_pos", sb.converged && max_of(sb.u) < eps,
           fmt::format("{} < {}", num(max_of(sb.u)), num(eps)));
  const double dv = max_abs((sb.v.array() - below.mu).matrix());
  ck.check("0.95 theta_star: |v - mu| < 1e-4", dv < 1e-4, num(dv));

  // 2D smoke run of the coexistence case.
  ParamSet above2 = p;
  const double ts2 = theta_star(p, ctx.mesh2d, tol);
  above2.theta = ts2 + 0.1 * (th0 - ts2);
  const SteadyState s2 = settle_from(ctx.mesh2d, above2, ctx.settle, 0.5 * above2.theta, above2.mu);
  ctx.keep("2D above theta_star", ctx.mesh2d, above2, s2);
  const Outcome o2 = classify_outcome(s2, eps_of(ctx, above2));
  ck.check("2D 41x41 coexists above theta_star", s2.converged && o2.label == OutcomeLabel::Coexistence,
           fmt::format("{} min u {}", outcome_name(o2.label), num(o2.min_u)));

  const std::vector<double> grid = linspace(0.5 * ts, th0, 40);
  const SweepResult sw = sweep_theta(ctx.mesh, p, grid, ctx.settle);
  record_branch(ctx, "sweep mu=1", p, sw);
  ck.note("sweep", describe(sw));
  if (!sw.estimate) {
    ck.check("bifurcation detected", false, "none");
  } else {
    const double gap = std::abs(sw.estimate->theta_hat - ts) / ts;
    ck.check("detected onset within 2% of theta_star", gap < 0.02,
             fmt::format("{} vs {} (relative gap {})", num(sw.estimate->theta_hat), num(ts), num(gap)));
  }
  return ck.take();
}

CriterionResult criterion5(Context& ctx) {
  Checker ck(5, "predator survival threshold for negative mu");
  ParamSet p = base_params();
  p.c = 1.0;
  p.m = 0.5;
  p.mu = -0.5;
  const double tn = theta_neg(p);
  ck.note("theta_neg", num(tn));

  ParamSet hi = p;
  hi.theta = 1.1 * tn;
  const SteadyState sh = settle_from(ctx.mesh, hi, ctx.settle, 0.5 * hi.theta, 0.5);
  ctx.keep("1.1 theta_neg", ctx.mesh, hi, sh);
  const Outcome oh = classify_outcome(sh, eps_of(ctx, hi));
  ck.check("1.1 theta_neg coexists", sh.converged && oh.label == OutcomeLabel::Coexistence,
           fmt::format("{} min v {}", outcome_name(oh.label), num(oh.min_v)));

  ParamSet lo = p;
  lo.theta = 0.9 * tn;
  const SteadyState sl = settle_from(ctx.mesh, lo, ctx.settle, 0.5 * lo.theta, 0.5);
  ctx.keep("0.9 theta_neg", ctx.mesh, lo, sl);
  ck.check("0.9 theta_neg: max v < 1e-5", sl.converged && max_of(sl.v) < 1e-5, num(max_of(sl.v)));
  const double du = max_abs((sl.u.array() - lo.theta).matrix());
  ck.check("0.9 theta_neg: |u - theta| < 1e-5", du < 1e-5, num(du));

  const std::vector<double> up = linspace(0.5 * tn, 1.5 * tn, 40);
  const std::vector<double> down(up.rbegin(), up.rend());
  const double step = up[1] - up[0];
  const SweepResult sa = sweep_theta(ctx.mesh, p, up, ctx.settle);
  const SweepResult sd = sweep_theta(ctx.mesh, p, down, ctx.settle);
  record_branch(ctx, "ascending", p, sa);
  record_branch(ctx, "descending", p, sd);
  ck.note("ascending sweep", describe(sa));
  ck.note("descending sweep", describe(sd));
  if (!sa.estimate || !sd.estimate) {
    ck.check("bifurcation detected in both directions", false, "missing");
  } else {
    const double a = sa.estimate->theta_hat;
    const double d = sd.estimate->theta_hat;
    ck.check("ascending and descending agree within one grid step", std::abs(a - d) <= step,
             fmt::format("{} vs {} (step {})", num(a), num(d), num(step)));
    const double gap = std::abs(a - tn) / tn;
    ck.check("detected onset within 2% of theta_neg", gap < 0.02, fmt::format("relative gap {}", num(gap)));
  }
  return ck.take();
}

CriterionResult criterion6(Context& ctx) {
  Checker ck(6, "large-mu limit, uniqueness and stability");
  const double tol = ctx.options.solver.eigen_tol;
  ParamSet p = base_params();
  const double th1 = theta1(p, ctx.mesh, tol);
  p.theta = th1 + 0.5;
  ck.note("theta", num(p.theta));
  const std::vector<double> mus{8, 16, 32, 64};
  const AsymptoticResult ar =
      asymptotic_mu(ctx.mesh, p, mus, ctx.settle, ctx.options.solver.multistart, ctx.options.solver.seed, 1);
  bool eu_dec = true;
  bool ev_dec = true;
  for (std::size_t i = 0; i < ar.rows.size(); ++i) {
    const AsymptoticRow& r = ar.rows[i];
    ParamSet q = p;
    q.mu = r.mu;
    ctx.keep(fmt::format("mu={}", num(r.mu)), ctx.mesh, q, r.state);
    ck.check(fmt::format("mu={} coexistence from every start", num(r.mu)), !r.flagged, r.status);
    ck.note(fmt::format("mu={}", num(r.mu)),
            fmt::format("e_u {} e_v {} spread {} eta {}", num(r.e_u), num(r.e_v), num(r.multistart_spread),
                        num(r.eta_re)));
    const double vtol = 1e-6 * std::max(1.0, p.theta);
    ck.check(fmt::format("mu={} e_v <= c theta/(1+m theta+k mu)", num(r.mu)), r.e_v <= r.e_v_bound + vtol,
             fmt::format("{} <= {}", num(r.e_v), num(r.e_v_bound)));
    if (i > 0) {
      eu_dec = eu_dec && r.e_u < ar.rows[i - 1].e_u;
      ev_dec = ev_dec && r.e_v < ar.rows[i - 1].e_v;
    }
    if (r.mu >= 32) {
      ck.check(fmt::format("mu={} multistart spread < 1e-6", num(r.mu)), r.multistart_spread < 1e-6,
               num(r.multistart_spread));
      ck.check(fmt::format("mu={} stable (eta_re > 1e-6)", num(r.mu)),
               r.eta_re > 1e-6 && r.verdict == Verdict::Stable, num(r.eta_re));
    }
  }
  ck.check("e_u strictly decreasing", eu_dec, eu_dec ? "yes" : "no");
  ck.check("e_v strictly decreasing", ev_dec, ev_dec ? "yes" : "no");
  const EtaStar es = eta_star(ctx.mesh, p, tol);
  ck.check("eta_star > 0", es.eigen_value > 0.0, num(es.eigen_value));
  const double gap = std::abs(es.eigen_value - es.integral_ratio);
  ck.check("eta_star eigenvalue vs integral ratio within 1e-6", gap <= 1e-6,
           fmt::format("{} vs {}", num(es.eigen_value), num(es.integral_ratio)));
  return ck.take();
}

CriterionResult criterion8(Context& ctx) {
  Checker ck(8, "scalar problems and homotopy");
  const double tol = ctx.options.solver.eigen_tol;
  ParamSet p = base_params();
  const double th1 = theta1(p, ctx.mesh, tol);
  const Field q0 = limit_potential(ctx.mesh, p);

  const ScalarSolution lo = solve_logistic(ctx.mesh, th1 - 0.05, q0);
  ck.check("theta1 - 0.05 classified zero", lo.classification == ScalarClass::Zero, num(max_of(lo.field)));
  const ScalarSolution hi = solve_logistic(ctx.mesh, th1 + 0.05, q0);
  ck.check("theta1 + 0.05 classified positive", hi.classification == ScalarClass::Positive, num(min_of(hi.field)));
  const ScalarSolution hi2 = solve_logistic(ctx.mesh, th1 + 0.05, q0, subsolution_start(ctx.mesh, th1 + 0.05, q0));
  const double two = max_abs(hi.field - hi2.field);
  ck.check("two starts agree within 1e-8", hi2.classification == ScalarClass::Positive && two < 1e-8, num(two));

  ParamSet big = p;
  big.theta = th1 + 0.5;
  big.mu = 1e4;
  const ScalarSolution limit = solve_logistic(ctx.mesh, big.theta, q0);
  const ScalarSolution aux = solve_aux_mu(ctx.mesh, big);
  const double da = max_abs(aux.field - limit.field);
  ck.check("aux problem at mu = 1e4 within 1e-2 of the limit", da < 1e-2, num(da));

  ParamSet h = p;
  h.theta = th1 + 0.5;
  h.mu = 16.0;
  const CoupledModel model(ctx.mesh, h);
  const HomotopyResult hr = homotopy_t(model, uniform_t_grid(10));
  const auto [u0, v0] = multistart_initial(model, 0, ctx.options.solver.seed);
  const SteadyState direct = settle(model, u0, v0, ctx.settle).state;
  const double dh = std::max(max_abs(hr.state.u - direct.u), max_abs(hr.state.v - direct.v));
  ck.check("homotopy endpoint vs direct solve within 1e-8", hr.state.converged && direct.converged && dh < 1e-8,
           num(dh));
  return ck.take();
}

CriterionResult criterion7(const Context& ctx) {
  Checker ck(7, "a priori bounds on every converged state");
  int failures = 0;
  for (const Collected& c : ctx.collected) {
    const double eps = ctx.settle.eps_pos > 0.0 ? ctx.settle.eps_pos : default_eps_pos(c.params);
    const BoundReport b = check_apriori(c.state, c.params, eps);
    if (!b.pass()) {
      ++failures;
      ck.check(c.label, false,
               fmt::format("u in [{}, {}], v in [{}, {}]", num(b.min_u), num(b.max_u), num(b.min_v), num(b.max_v)));
    }
  }
  ck.check("states checked", !ctx.collected.empty(), fmt::format("{} ({} failing)", ctx.collected.size(), failures));
  return ck.take();
}

CriterionResult criterion9(const Context& ctx) {
  Checker ck(9, "discrete predator integral identity");
  double worst = 0.0;
  std::string worst_label = "none";
  for (const Collected& c : ctx.collected) {
    const CoupledModel model(*c.mesh, c.params);
    const double bound = 1e-8 * c.mesh->measure_omega1();
    const double value = std::abs(predator_integral(model, c.state));
    if (value > bound) ck.check(c.label, false, fmt::format("{} > {}", num(value), num(bound)));
    const double rel = value / bound;
    if (rel >= worst) {
      worst = rel;
      worst_label = c.label;
    }
  }
  ck.check("states checked", !ctx.collected.empty(), std::to_string(ctx.collected.size()));
  ck.note("largest |integral| / bound", fmt::format("{} ({})", num(worst), worst_label));
  return ck.take();
}

std::string render(const VerifyOptions& options, const std::vector<CriterionResult>& results) {
  const DomainSpec& d = options.domain;
  std::string out = "refugium verification report\n";
  out += fmt::format("domain: dimension {} lx {} ly {} resolution {}", d.dimension, num(d.lx), num(d.ly), d.resolution);
  if (d.zone) {
    out += fmt::format(" zone_x [{}, {}]", num((*d.zone)[0].lo), num((*d.zone)[0].hi));
    if (d.dimension == 2) out += fmt::format(" zone_y [{}, {}]", num((*d.zone)[1].lo), num((*d.zone)[1].hi));
  } else {
    out += " zone none";
  }
  out += fmt::format("\neigen_tol: {}\n", num(options.solver.eigen_tol));
  int passed = 0;
  for (const CriterionResult& r : results) {
    out += fmt::format("criterion {} {} {}\n", r.id, r.pass ? "PASS" : "FAIL", r.name);
    for (const std::string& line : r.details) out += "  " + line + "\n";
    passed += r.pass ? 1 : 0;
  }
  out += fmt::format("result: {}/{} PASS\n", passed, results.size());
  return out;
}

std::vector<CriterionResult> run_once(const VerifyOptions& options) {
  const Mesh mesh(options.domain);
  const Mesh mesh2d(smoke_domain_2d());
  Context ctx{options, mesh, mesh2d, options.solver.settle_options(), {}, {}};

  using Task = std::function<CriterionResult(Context&)>;
  const std::vector<std::pair<int, Task>> tasks{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},
      {5, criterion5}, {6, criterion6}, {8, criterion8},
  };
  const std::vector<std::string> names{"", "eigenvalue correctness", "threshold monotonicity and limits",
                                       "semitrivial and prey-safe regimes", "coexistence onset at theta_star",
                                       "predator survival threshold for negative mu",
                                       "large-mu limit, uniqueness and stability", "",
                                       "scalar problems and homotopy"};
  auto wanted = [&](int id) {
    return options.only.empty() || std::find(options.only.begin(), options.only.end(), id) != options.only.end();
  };
  std::vector<std::pair<int, Task>> chosen;
  for (const auto& t : tasks)
    if (wanted(t.first)) chosen.push_back(t);
  std::vector<CriterionResult> results(chosen.size());
  parallel_for(static_cast<int>(chosen.size()), options.threads, [&](int i) {
    try {
      results[i] = chosen[i].second(ctx);
    } catch (const std::exception& e) {
      Checker ck(chosen[i].first, names[chosen[i].first]);
      ck.fail(e.what());
      results[i] = ck.take();
    }
  });

  // Collection order depends on thread timing; sort for a stable report.
  std::sort(ctx.collected.begin(), ctx.collected.end(),
            [](const Collected& a, const Collected& b) { return a.label < b.label; });
  if (wanted(7)) results.push_back(criterion7(ctx));
  if (wanted(9)) results.push_back(criterion9(ctx));
  std::sort(results.begin(), results.end(), [](const CriterionResult& a, const CriterionResult& b) { return a.id < b.id; });
  return results;
}

}  // namespace

VerifyReport run_verify(const VerifyOptions& options) {
  VerifyReport report;
  report.criteria = run_once(options);
  const bool want10 =
      options.only.empty() || std::find(options.only.begin(), options.only.end(), 10) != options.only.end();
  Checker ck(10, "determinism");
  if (!want10) {
    report.text = render(options, report.criteria);
    return report;
  }
  if (options.determinism) {
    const std::string first = render(options, report.criteria);
    const std::string second = render(options, run_once(options));
    ck.check("repeated run yields a byte-identical report", first == second,
             first == second ? "identical" : "reports differ");
  } else {
    ck.check("repeated run", false, "skipped");
  }
  report.criteria.push_back(ck.take());
  report.text = render(options, report.criteria);
  return report;
}

}  // namespace refugium
