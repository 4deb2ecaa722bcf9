#include "refugium/commands.hpp"

#include "refugium/report.hpp"
#include "refugium/stability.hpp"
#include "refugium/sweep.hpp"
#include "refugium/thresholds.hpp"
#include "refugium/verify.hpp"

#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>

namespace refugium {

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

namespace {

class OutputDir {
 public:
  explicit OutputDir(const std::string& dir) : dir_(dir.empty() ? "." : dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw ConfigError(0, fmt::format("cannot create output directory '{}': {}", dir_.string(), ec.message()));
  }

  void write(const std::string& name, const std::string& body) const {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError(0, fmt::format("cannot write '{}'", path.string()));
    out << body;
  }

 private:
  std::filesystem::path dir_;
};

void say(const CommandContext& ctx, const std::string& text) {
  if (ctx.console != nullptr) *ctx.console << text;
}

std::string header(const std::string& command, const RunConfig& cfg, const Mesh& mesh) {
  const ParamSet& p = cfg.params;
  std::string out = fmt::format("refugium {}\n", command);
  out += fmt::format("domain: dimension {} nodes {} h {}", mesh.dimension(), mesh.node_count(), num(mesh.hx()));
  if (mesh.has_zone()) {
    const auto& z = *mesh.spec().zone;
    out += fmt::format(" zone_x [{}, {}]", num(z[0].lo), num(z[0].hi));
    if (mesh.dimension() == 2) out += fmt::format(" zone_y [{}, {}]", num(z[1].lo), num(z[1].hi));
  } else {
    out += " zone none";
  }
  out += fmt::format("\nparams: theta {} mu {} a {} c {} m {} k {} d1 {} d2 {}\n", num(p.theta), num(p.mu), num(p.a),
                     num(p.c), num(p.m), num(p.k), num(p.d1), num(p.d2));
  return out;
}

int guarded(const CommandContext& ctx, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    say(ctx, fmt::format("error: {}\n", e.what()));
    return kExitConfigError;
  } catch (const GeometryError& e) {
    say(ctx, fmt::format("error: {}\n", e.what()));
    return kExitConfigError;
  } catch (const ParameterError& e) {
    say(ctx, fmt::format("error: {}\n", e.what()));
    return kExitConfigError;
  } catch (const Error& e) {
    say(ctx, fmt::format("solver failure: {}\n", e.what()));
    return kExitSolverFailed;
  }
}

std::string optional_num(const std::optional<double>& v) { return v ? num(*v) : "nan"; }

std::string thresholds_text(const ThresholdReport& r, const ParamSet& p) {
  std::string out;
  out += fmt::format("theta0: {}\n", num(r.theta0));
  out += fmt::format("theta_star: {}\n", r.theta_star ? num(*r.theta_star) : "undefined (mu < 0)");
  out += fmt::format("theta1: {}\n", num(r.theta1));
  if (r.theta_neg) {
    out += fmt::format("theta_neg: {}\n", num(*r.theta_neg));
  } else if (p.mu > 0.0) {
    out += "theta_neg: undefined (mu > 0)\n";
  } else {
    out += "theta_neg: undefined (mu <= -c/m)\n";
  }
  out += fmt::format("handling condition m <= (1+k mu)^2/(a mu): {}\n", handling_condition(p) ? "holds" : "fails");
  out += fmt::format("regime: {}\n", regime_name(r.regime));
  return out;
}

int success_code(int ok, int total) { return 10 * ok >= 9 * total ? kExitOk : kExitSolverFailed; }

std::vector<double> default_theta_grid(const Mesh& mesh, const RunConfig& cfg) {
  const ParamSet& p = cfg.params;
  const SweepConfig& s = cfg.sweep;
  std::vector<double> grid;
  if (!s.theta_grid.empty()) {
    grid = s.theta_grid;
  } else {
    const double th0 = theta0(p);
    double lo = 0.1 * th0;
    double hi = 2.0 * th0;
    if (const auto onset = predicted_onset(mesh, p, cfg.solver.eigen_tol); onset && *onset > 0.0) {
      lo = 0.5 * *onset;
      hi = p.mu > 0.0 ? th0 : 1.5 * *onset;
    }
    if (s.theta_min) lo = *s.theta_min;
    if (s.theta_max) hi = *s.theta_max;
    if (!(lo < hi)) throw ConfigError(0, fmt::format("empty theta range [{}, {}]", num(lo), num(hi)));
    const int n = s.theta_points;
    for (int i = 0; i < n; ++i) grid.push_back(lo + (hi - lo) * i / (n - 1));
  }
  if (s.descending) std::reverse(grid.begin(), grid.end());
  return grid;
}

std::vector<double> default_zone_widths(const DomainSpec& d, const Mesh& mesh) {
  const double h = mesh.hx();
  const double half = 0.5 * (d.dimension == 2 ? std::min(d.lx, d.ly) : d.lx);
  auto snap = [&](double w) { return std::max(1.0, std::round(w / h)) * h; };
  return {snap(h), snap(0.2 * half), snap(0.4 * half), snap(0.6 * half), snap(0.8 * half), half - h};
}

}  // namespace

int cmd_thresholds(const CommandContext& ctx) {
  return guarded(ctx, [&] {
    const RunConfig& cfg = ctx.config;
    const Mesh mesh(cfg.domain);
    const ParamSet& p = cfg.params;
    const ThresholdReport r = compute_thresholds(p, mesh, cfg.solver.eigen_tol);
    const std::string text = header("thresholds", cfg, mesh) + thresholds_text(r, p);
    const OutputDir out(ctx.out_dir);
    out.write("report.txt", text);
    out.write("thresholds.csv",
              fmt::format("theta,mu,theta0,theta_star,theta1,theta_neg,regime\n{},{},{},{},{},{},{}\n", num(p.theta),
                          num(p.mu), num(r.theta0), optional_num(r.theta_star), num(r.theta1),
                          optional_num(r.theta_neg), regime_name(r.regime)));
    say(ctx, text);
    return kExitOk;
  });
}

int cmd_steady(const CommandContext& ctx) {
  return guarded(ctx, [&] {
    const RunConfig& cfg = ctx.config;
    const Mesh mesh(cfg.domain);
    const ParamSet& p = cfg.params;
    const CoupledModel model(mesh, p);
    const SettleOptions opts = cfg.solver.settle_options();
    const double eps = opts.eps_pos > 0.0 ? opts.eps_pos : default_eps_pos(p);
    const auto [u0, v0] = multistart_initial(model, 0, cfg.solver.seed);
    const OutputDir out(ctx.out_dir);

    const EvolveResult march = evolve(model, u0, v0, opts.evolve);
    SteadyState state = march.state;
    std::string failure;
    try {
      state = solve_steady(model, march.state.u, march.state.v, opts.newton);
    } catch (const Error& e) {
      failure = e.what();
    }
    const bool converged = failure.empty() && state.converged;

    std::string csv;
    if (!converged)
      csv += fmt::format("# NOT_CONVERGED residual {} at t = {}\n", num(march.state.residual), num(march.t_end));
    csv += mesh.dimension() == 2 ? "node,x,y,u,v\n" : "node,x,u,v\n";
    const Field ve = extend_from_omega1(mesh, state.v, NAN);
    for (int i = 0; i < mesh.node_count(); ++i) {
      csv += fmt::format("{},{}", i, num(mesh.x(i)));
      if (mesh.dimension() == 2) csv += "," + num(mesh.y(i));
      csv += fmt::format(",{},{}\n", num(state.u[i]), num(ve[i]));
    }
    out.write("state.csv", csv);

    std::string series = "t,min_u,max_u,min_v,max_v,residual\n";
    for (const TimeSample& s : march.series)
      series += fmt::format("{},{},{},{},{},{}\n", num(s.t), num(s.min_u), num(s.max_u), num(s.min_v), num(s.max_v),
                            num(s.residual));
    out.write("timeseries.csv", series);

    std::string text = header("steady", cfg, mesh);
    text += fmt::format("predicted regime: {}\n", regime_name(classify_regime(p, mesh, cfg.solver.eigen_tol)));
    text += fmt::format("time march: t_end {} steps {} dt {} converged {}\n", num(march.t_end), march.steps,
                        num(march.dt), march.state.converged ? "yes" : "no");
    if (!converged) {
      text += fmt::format("status: NOT_CONVERGED{}\n", failure.empty() ? "" : " (" + failure + ")");
      out.write("report.txt", text);
      say(ctx, text);
      return kExitSolverFailed;
    }
    const Outcome o = classify_outcome(state, eps);
    const BoundReport b = check_apriori(state, p, eps);
    const StabilityVerdict sv = principal_eta(linearize(model, state));
    text += fmt::format("newton: steps {} residual {}\n", state.iterations, num(state.residual));
    text += fmt::format("outcome: {}\n", outcome_name(o.label));
    text += fmt::format("min_u: {}\nmax_u: {}\nmin_v: {}\nmax_v: {}\n", num(o.min_u), num(o.max_u), num(o.min_v),
                        num(o.max_v));
    text += fmt::format("apriori: {}\n", b.pass() ? "PASS" : "FAIL");
    text += fmt::format("predator integral: {}\n", num(predator_integral(model, state)));
    text += fmt::format("eta_re: {} ({}, {})\n", num(sv.eta_re), verdict_name(sv.verdict), sv.method);
    text += "status: CONVERGED\n";
    out.write("report.txt", text);
    say(ctx, text);
    return kExitOk;
  });
}

int cmd_sweep(const CommandContext& ctx) {
  return guarded(ctx, [&] {
    const RunConfig& cfg = ctx.config;
    const Mesh mesh(cfg.domain);
    const ParamSet& p = cfg.params;
    const std::vector<double> grid = default_theta_grid(mesh, cfg);
    SweepOptions so;
    so.warm_start = cfg.sweep.warm_start;
    so.compute_eta = cfg.sweep.compute_eta;
    so.threads = ctx.threads;
    const SweepResult r = sweep_theta(mesh, p, grid, cfg.solver.settle_options(), so);

    int ok = 0;
    std::string csv = "parameter,min_u,max_u,min_v,max_v,residual,outcome,eta_re,status\n";
    for (const BranchPoint& bp : r.points) {
      ok += bp.ok ? 1 : 0;
      csv += fmt::format("{},{},{},{},{},{},{},{},{}\n", num(bp.parameter), num(bp.min_u), num(bp.max_u),
                         num(bp.min_v), num(bp.max_v), num(bp.residual), outcome_name(bp.outcome), num(bp.eta_re),
                         csv_field(bp.status));
    }
    const std::optional<double> predicted = predicted_onset(mesh, p, cfg.solver.eigen_tol);
    std::string bif = "theta_hat,theta_star_predicted,rel_gap\n";
    if (r.estimate) {
      const double gap = predicted ? std::abs(r.estimate->theta_hat - *predicted) / std::abs(*predicted) : NAN;
      bif += fmt::format("{},{},{}\n", num(r.estimate->theta_hat), optional_num(predicted), num(gap));
    } else {
      bif += fmt::format("nan,{},nan\n", optional_num(predicted));
    }
    const OutputDir out(ctx.out_dir);
    out.write("branch.csv", csv);
    out.write("bifurcation.csv", bif);

    std::string text = header("sweep", cfg, mesh);
    text += fmt::format("grid: {} points from {} to {}\n", grid.size(), num(grid.front()), num(grid.back()));
    text += fmt::format("solved: {}/{}\n", ok, grid.size());
    text += fmt::format("max jump between neighbours: {}\n", num(r.max_jump));
    if (r.estimate) {
      text += fmt::format("detected onset: {} in [{}, {}] ({})\n", num(r.estimate->theta_hat),
                          num(r.estimate->bracket_lo), num(r.estimate->bracket_hi), r.estimate->method);
    } else {
      text += "detected onset: none\n";
    }
    text += fmt::format("predicted onset: {}\n", optional_num(predicted));
    out.write("report.txt", text);
    say(ctx, text);
    return success_code(ok, static_cast<int>(grid.size()));
  });
}

int cmd_zones(const CommandContext& ctx) {
  return guarded(ctx, [&] {
    const RunConfig& cfg = ctx.config;
    const Mesh mesh(cfg.domain);
    const std::vector<double> widths =
        cfg.sweep.zone_widths.empty() ? default_zone_widths(cfg.domain, mesh) : cfg.sweep.zone_widths;
    const ZoneStudy zs = zone_study(cfg.domain, widths, cfg.params, cfg.solver.eigen_tol, ctx.threads);
    int ok = 0;
    std::string csv = "half_width,zone_measure,theta_star,status\n";
    for (const ZoneRow& r : zs.rows) {
      ok += r.ok ? 1 : 0;
      csv += fmt::format("{},{},{},{}\n", num(r.half_width), num(r.zone_measure), num(r.theta_star),
                         csv_field(r.status));
    }
    const OutputDir out(ctx.out_dir);
    out.write("zones.csv", csv);
    std::string text = header("zones", cfg, mesh);
    text += fmt::format("zones: {} ({} solved)\n", zs.rows.size(), ok);
    text += fmt::format("theta_star strictly decreasing: {}\n", zs.strictly_decreasing ? "yes" : "no");
    text += fmt::format("no-zone limit a mu/(1+k mu): {}\n", num(zs.no_zone_limit));
    out.write("report.txt", text);
    say(ctx, text);
    return success_code(ok, static_cast<int>(zs.rows.size()));
  });
}

int cmd_asymptotic(const CommandContext& ctx) {
  return guarded(ctx, [&] {
    const RunConfig& cfg = ctx.config;
    const Mesh mesh(cfg.domain);
    const ParamSet& p = cfg.params;
    const double th1 = theta1(p, mesh, cfg.solver.eigen_tol);
    if (!(p.theta > th1))
      throw ParameterError(fmt::format("asymptotic: theta {} must exceed theta1 = {}", num(p.theta), num(th1)));
    const AsymptoticResult ar = asymptotic_mu(mesh, p, cfg.sweep.mu_list, cfg.solver.settle_options(),
                                              cfg.solver.multistart, cfg.solver.seed, ctx.threads);
    int ok = 0;
    std::string csv =
        "mu,e_u,e_v,e_v_bound,multistart_spread,eta_re,verdict,outcome,apriori,predator_integral,status\n";
    for (const AsymptoticRow& r : ar.rows) {
      ok += r.flagged ? 0 : 1;
      csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", num(r.mu), num(r.e_u), num(r.e_v), num(r.e_v_bound),
                         num(r.multistart_spread), num(r.eta_re), verdict_name(r.verdict), outcome_name(r.outcome),
                         r.bounds_pass ? "PASS" : "FAIL", num(r.integral), csv_field(r.status));
    }
    std::string text = header("asymptotic", cfg, mesh);
    text += fmt::format("theta1: {}\n", num(th1));
    try {
      const EtaStar es = eta_star(mesh, p, cfg.solver.eigen_tol);
      text += fmt::format("eta_star: {} (integral ratio {})\n", num(es.eigen_value), num(es.integral_ratio));
    } catch (const Error& e) {
      text += fmt::format("eta_star: failed ({})\n", e.what());
    }
    text += fmt::format("rows: {} ({} clean)\n", ar.rows.size(), ok);
    const OutputDir out(ctx.out_dir);
    out.write("asymptotic.csv", csv);
    out.write("report.txt", text);
    say(ctx, text);
    return success_code(ok, static_cast<int>(ar.rows.size()));
  });
}

int cmd_verify(const CommandContext& ctx) {
  return guarded(ctx, [&] {
    VerifyOptions vo;
    if (ctx.config.has_domain) vo.domain = ctx.config.domain;
    vo.solver = ctx.config.solver;
    vo.threads = ctx.threads;
    const VerifyReport report = run_verify(vo);
    const OutputDir out(ctx.out_dir);
    out.write("report.txt", report.text);
    for (const CriterionResult& c : report.criteria)
      say(ctx, fmt::format("{} criterion {:2d}: {}\n", c.pass ? "PASS" : "FAIL", c.id, c.name));
    return report.all_pass() ? kExitOk : kExitVerifyFailed;
  });
}

int run_command(const std::string& name, const CommandContext& ctx) {
  static const std::map<std::string, int (*)(const CommandContext&)> table{
      {"thresholds", cmd_thresholds}, {"steady", cmd_steady},         {"sweep", cmd_sweep},
      {"zones", cmd_zones},           {"asymptotic", cmd_asymptotic}, {"verify", cmd_verify},
  };
  const auto it = table.find(name);
  if (it == table.end()) {
    say(ctx, fmt::format("error: unknown command '{}'\n", name));
    return kExitConfigError;
  }
  return it->second(ctx);
}

}  // namespace refugium
