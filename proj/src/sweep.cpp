#include "refugium/sweep.hpp"

#include "refugium/scalar.hpp"
#include "refugium/thresholds.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

namespace refugium {

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  const int workers = std::clamp(threads, 1, std::max(1, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(n);
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

SettleResult settle(const CoupledModel& model, const Field& u0, const Field& v0, const SettleOptions& options,
                    bool require_march) {
  SettleResult out;
  out.march = evolve(model, u0, v0, options.evolve);
  out.march_converged = out.march.state.converged;
  if (!out.march_converged && require_march)
    throw ConvergenceError(fmt::format("time march not converged by t = {}", out.march.t_end), out.march.state.residual);
  out.state = solve_steady(model, out.march.state.u, out.march.state.v, options.newton);
  out.newton_steps = out.state.iterations;
  return out;
}

namespace {

double eps_for(const SettleOptions& o, const ParamSet& p) { return o.eps_pos > 0.0 ? o.eps_pos : default_eps_pos(p); }

double state_distance(const SteadyState& a, const SteadyState& b) {
  return std::max(max_abs(a.u - b.u), max_abs(a.v - b.v));
}

}  // namespace

SweepResult sweep_theta(const Mesh& mesh, const ParamSet& params, const std::vector<double>& theta_grid,
                        const SettleOptions& settle_options, const SweepOptions& sweep_options) {
  if (theta_grid.empty()) throw ParameterError("sweep_theta: empty grid");
  bool ascending = true;
  bool descending = true;
  for (std::size_t i = 1; i < theta_grid.size(); ++i) {
    ascending = ascending && theta_grid[i] > theta_grid[i - 1];
    descending = descending && theta_grid[i] < theta_grid[i - 1];
  }
  if (!ascending && !descending) throw ParameterError("sweep_theta: grid must be strictly monotone");
  for (double t : theta_grid)
    if (!(t > 0.0)) throw ParameterError("sweep_theta: theta values must be positive");

  SweepResult out;
  const int n = static_cast<int>(theta_grid.size());
  out.points.resize(n);

  auto run_point = [&](int i, const SteadyState* warm) {
    ParamSet p = params;
    p.theta = theta_grid[i];
    BranchPoint& bp = out.points[i];
    bp.parameter = p.theta;
    const double eps = eps_for(settle_options, p);
    try {
      const CoupledModel model(mesh, p);
      // A species absent from the warm state is reseeded so that invasion
      // past the threshold can happen.
      Field u0 = Field::Constant(model.nu(), 0.5 * p.theta);
      Field v0 = Field::Constant(model.nv(), p.mu > 0.0 ? p.mu : 0.5);
      if (warm != nullptr) {
        if (max_of(warm->u) > eps) u0 = warm->u;
        if (max_of(warm->v) > eps) v0 = warm->v;
      }
      const SettleResult r = settle(model, u0, v0, settle_options);
      bp.state = r.state;
      const Outcome o = classify_outcome(r.state, eps);
      bp.min_u = o.min_u;
      bp.max_u = o.max_u;
      bp.min_v = o.min_v;
      bp.max_v = o.max_v;
      bp.outcome = o.label;
      bp.residual = r.state.residual;
      bp.bounds_pass = check_apriori(r.state, p, eps).pass();
      if (sweep_options.compute_eta) bp.eta_re = principal_eta(linearize(model, r.state)).eta_re;
      bp.ok = true;
      bp.status = r.march_converged ? "ok" : "ok-newton-rescue";
    } catch (const Error& e) {
      bp.ok = false;
      bp.status = fmt::format("failed: {}", e.what());
    }
  };

  if (sweep_options.warm_start) {
    const SteadyState* warm = nullptr;
    for (int i = 0; i < n; ++i) {
      run_point(i, warm);
      if (out.points[i].ok) warm = &out.points[i].state;
    }
  } else {
    parallel_for(n, sweep_options.threads, [&](int i) { run_point(i, nullptr); });
  }

  for (int i = 1; i < n; ++i)
    if (out.points[i].ok && out.points[i - 1].ok)
      out.max_jump = std::max(out.max_jump, state_distance(out.points[i].state, out.points[i - 1].state));

  out.estimate = detect_bifurcation(out.points);
  return out;
}

std::optional<BifurcationEstimate> detect_bifurcation(const std::vector<BranchPoint>& points) {
  const int n = static_cast<int>(points.size());
  auto coexist = [&](int i) { return points[i].ok && points[i].outcome == OutcomeLabel::Coexistence; };
  auto other = [&](int i) { return points[i].ok && points[i].outcome != OutcomeLabel::Coexistence; };

  for (int i = 0; i + 1 < n; ++i) {
    int c = -1;
    int nc = -1;
    if (other(i) && coexist(i + 1)) {
      nc = i;
      c = i + 1;
    } else if (coexist(i) && other(i + 1)) {
      c = i;
      nc = i + 1;
    } else {
      continue;
    }
    const bool use_v = points[nc].outcome == OutcomeLabel::PreyOnly;
    auto quantity = [&](int k) { return use_v ? points[k].min_v : points[k].min_u; };

    BifurcationEstimate est;
    est.bracket_lo = points[nc].parameter;
    est.bracket_hi = points[c].parameter;
    const double lo = std::min(est.bracket_lo, est.bracket_hi);
    const double hi = std::max(est.bracket_lo, est.bracket_hi);
    const int c2 = c + (c - nc);
    if (c2 >= 0 && c2 < n && coexist(c2)) {
      const double t1 = points[c].parameter;
      const double t2 = points[c2].parameter;
      const double q1 = quantity(c);
      const double q2 = quantity(c2);
      const double slope = (q2 - q1) / (t2 - t1);
      if (std::isfinite(slope) && slope != 0.0) {
        est.theta_hat = std::clamp(t1 - q1 / slope, lo, hi);
        est.method = use_v ? "linear extrapolation of min v to zero" : "linear extrapolation of min u to zero";
      }
    }
    if (!std::isfinite(est.theta_hat)) {
      est.theta_hat = 0.5 * (lo + hi);
      est.method = "bracket midpoint";
    }
    return est;
  }
  return std::nullopt;
}

std::optional<double> predicted_onset(const Mesh& mesh, const ParamSet& params, double eigen_tol) {
  if (params.mu > 0.0) return theta_star(params, mesh, eigen_tol);
  if (theta_neg_defined(params)) return theta_neg(params);
  return std::nullopt;
}

std::pair<Field, Field> multistart_initial(const CoupledModel& model, int index, unsigned long long seed) {
  const ParamSet& p = model.params();
  const Mesh& mesh = model.mesh();
  const double v_top = p.mu_plus() + p.c * p.theta / (1.0 + p.m * p.theta + p.k * p.mu_plus());
  Field u(model.nu());
  Field v(model.nv());
  if (index == 0) {
    u.setConstant(p.theta);
    v.setConstant(v_top);
  } else if (index == 1) {
    const double lx = mesh.spec().lx;
    for (int i = 0; i < model.nu(); ++i)
      u[i] = 0.5 * p.theta * (1.0 + 0.5 * std::cos(std::numbers::pi * mesh.x(i) / lx));
    v.setConstant(0.5 * p.mu_plus() + 0.1);
  } else {
    std::mt19937_64 rng(seed + static_cast<unsigned long long>(index));
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    for (int i = 0; i < model.nu(); ++i) u[i] = p.theta * unit(rng);
    for (int s = 0; s < model.nv(); ++s) v[s] = std::max(v_top, 0.5) * unit(rng);
  }
  return {u, v};
}

AsymptoticResult asymptotic_mu(const Mesh& mesh, const ParamSet& params, const std::vector<double>& mu_list,
                               const SettleOptions& settle_options, int starts, unsigned long long seed, int threads) {
  if (mu_list.empty()) throw ParameterError("asymptotic_mu: empty mu list");
  if (!std::is_sorted(mu_list.begin(), mu_list.end()) ||
      std::adjacent_find(mu_list.begin(), mu_list.end()) != mu_list.end())
    throw ParameterError("asymptotic_mu: mu list must be strictly ascending");
  if (starts < 1) throw ParameterError("asymptotic_mu: need at least one start");
  params.validate();

  AsymptoticResult out;
  const ScalarSolution limit = solve_logistic(mesh, params.theta, limit_potential(mesh, params), {}, params.d1);
  if (limit.classification != ScalarClass::Positive)
    throw ParameterError("asymptotic_mu: theta must exceed theta1 (U_{theta,q0} vanishes)");
  out.limit_prey = limit.field;
  out.rows.resize(mu_list.size());

  parallel_for(static_cast<int>(mu_list.size()), threads, [&](int idx) {
    AsymptoticRow& row = out.rows[idx];
    ParamSet p = params;
    p.mu = mu_list[idx];
    row.mu = p.mu;
    row.e_v_bound = p.c * p.theta / (1.0 + p.m * p.theta + p.k * p.mu);
    const double eps = eps_for(settle_options, p);
    try {
      if (!(p.mu > 0.0)) throw ParameterError("asymptotic_mu: mu values must be positive");
      const CoupledModel model(mesh, p);
      std::vector<SteadyState> states;
      for (int s = 0; s < starts; ++s) {
        const auto [u0, v0] = multistart_initial(model, s, seed);
        states.push_back(settle(model, u0, v0, settle_options).state);
        if (classify_outcome(states.back(), eps).label != OutcomeLabel::Coexistence) row.flagged = true;
      }
      const SteadyState& st = states.front();
      row.state = st;
      row.outcome = classify_outcome(st, eps).label;
      row.e_u = max_abs(st.u - out.limit_prey);
      row.e_v = max_abs((st.v.array() - p.mu).matrix());
      row.multistart_spread = 0.0;
      for (std::size_t a = 0; a < states.size(); ++a)
        for (std::size_t b = a + 1; b < states.size(); ++b)
          row.multistart_spread = std::max(row.multistart_spread, state_distance(states[a], states[b]));
      const StabilityVerdict sv = principal_eta(linearize(model, st));
      row.eta_re = sv.eta_re;
      row.verdict = sv.verdict;
      row.bounds_pass = check_apriori(st, p, eps).pass();
      row.integral = predator_integral(model, st);
      if (row.flagged) row.status = "non-coexistence start";
    } catch (const Error& e) {
      row.flagged = true;
      row.status = fmt::format("failed: {}", e.what());
    }
  });
  return out;
}

ZoneStudy zone_study(const DomainSpec& base, const std::vector<double>& half_widths, const ParamSet& params,
                     double eigen_tol, int threads) {
  if (half_widths.empty()) throw ParameterError("zone_study: no zone widths");
  if (!std::is_sorted(half_widths.begin(), half_widths.end()))
    throw ParameterError("zone_study: half-widths must be ascending");
  ZoneStudy out;
  out.no_zone_limit = params.a * params.mu / (1.0 + params.k * params.mu);
  out.rows.resize(half_widths.size());
  parallel_for(static_cast<int>(half_widths.size()), threads, [&](int i) {
    ZoneRow& row = out.rows[i];
    row.half_width = half_widths[i];
    DomainSpec spec = base;
    const double cx = 0.5 * base.lx;
    const double cy = 0.5 * base.ly;
    const double w = half_widths[i];
    spec.zone = std::array<Interval, 2>{Interval{cx - w, cx + w}, Interval{cy - w, cy + w}};
    try {
      const Mesh mesh(spec);
      row.zone_measure = mesh.measure_zone();
      row.theta_star = theta_star(params, mesh, eigen_tol);
      row.ok = true;
    } catch (const Error& e) {
      row.status = fmt::format("failed: {}", e.what());
    }
  });
  out.strictly_decreasing = true;
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    if (!out.rows[i].ok) out.strictly_decreasing = false;
    if (i > 0 && out.rows[i].ok && out.rows[i - 1].ok && !(out.rows[i].theta_star < out.rows[i - 1].theta_star))
      out.strictly_decreasing = false;
  }
  return out;
}

}  // namespace refugium
