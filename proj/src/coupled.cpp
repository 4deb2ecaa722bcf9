#include "refugium/coupled.hpp"

#include "refugium/linsolve.hpp"
#include "refugium/scalar.hpp"

#include <Eigen/SparseLU>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace refugium {

std::string_view source_name(StateSource s) {
  switch (s) {
    case StateSource::Newton: return "newton";
    case StateSource::TimeMarch: return "time-march";
    case StateSource::Homotopy: return "homotopy";
  }
  return "newton";
}

std::string_view outcome_name(OutcomeLabel o) {
  switch (o) {
    case OutcomeLabel::Coexistence: return "COEXISTENCE";
    case OutcomeLabel::PreyOnly: return "PREY_ONLY";
    case OutcomeLabel::PredatorOnly: return "PREDATOR_ONLY";
    case OutcomeLabel::Extinct: return "EXTINCT";
  }
  return "EXTINCT";
}

CoupledModel::CoupledModel(const Mesh& mesh, const ParamSet& params)
    : mesh_(&mesh),
      params_(params),
      op_omega_(neumann_laplacian(mesh, Region::Omega)),
      op_omega1_(neumann_laplacian(mesh, Region::Omega1)),
      a_(predation_field(mesh, params.a)) {
  params.validate();
}

double CoupledModel::newton_tolerance() const {
  return 1e-10 * std::max({1.0, params_.theta, std::abs(params_.mu)});
}

void CoupledModel::reaction(const Field& u, const Field& v, Field& fu, Field& fv, double t) const {
  if (u.size() != nu() || v.size() != nv()) throw GeometryError("coupled: field sizes do not match the mesh");
  const ParamSet& p = params_;
  const Eigen::ArrayXd ve = extend_from_omega1(*mesh_, v, 0.0).array();
  const Eigen::ArrayXd ua = u.array();
  fu = (ua * (p.theta - ua - a_.array() * ve / (1.0 + p.m * ua + p.k * ve))).matrix();
  const Eigen::ArrayXd ur = restrict_to_omega1(*mesh_, u).array();
  const Eigen::ArrayXd va = v.array();
  fv = (va * (p.mu - va + t * p.c * ur / (1.0 + p.m * ur + p.k * va))).matrix();
}

void CoupledModel::residual(const Field& u, const Field& v, Field& ru, Field& rv, double t) const {
  Field fu, fv;
  reaction(u, v, fu, fv, t);
  ru = params_.d1 * op_omega_.apply(u) - fu;
  rv = params_.d2 * op_omega1_.apply(v) - fv;
}

double CoupledModel::residual_norm(const Field& u, const Field& v, double t) const {
  Field ru, rv;
  residual(u, v, ru, rv, t);
  return std::max(max_abs(ru), max_abs(rv));
}

Eigen::SparseMatrix<double> CoupledModel::jacobian(const Field& u, const Field& v, double t) const {
  const ParamSet& p = params_;
  const int n1 = nu();
  const int n2 = nv();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(op_omega_.stiffness.nonZeros() + op_omega1_.stiffness.nonZeros() + 2 * (n1 + n2));

  auto add_laplacian = [&](const Operator& op, double d, int offset) {
    for (int col = 0; col < op.stiffness.outerSize(); ++col)
      for (Eigen::SparseMatrix<double>::InnerIterator it(op.stiffness, col); it; ++it) {
        const int row = static_cast<int>(it.row());
        trip.emplace_back(offset + row, offset + col, d * it.value() / op.mass[row]);
      }
  };
  add_laplacian(op_omega_, p.d1, 0);
  add_laplacian(op_omega1_, p.d2, n1);

  const Field ve = extend_from_omega1(*mesh_, v, 0.0);
  for (int i = 0; i < n1; ++i) {
    const double den = 1.0 + p.m * u[i] + p.k * ve[i];
    const double den2 = den * den;
    trip.emplace_back(i, i, -(p.theta - 2.0 * u[i] - a_[i] * ve[i] * (1.0 + p.k * ve[i]) / den2));
    const int s = mesh_->omega1_index(i);
    if (s >= 0 && a_[i] != 0.0) trip.emplace_back(i, n1 + s, a_[i] * u[i] * (1.0 + p.m * u[i]) / den2);
  }
  for (int s = 0; s < n2; ++s) {
    const int node = mesh_->omega1_node(s);
    const double ur = u[node];
    const double den = 1.0 + p.m * ur + p.k * v[s];
    const double den2 = den * den;
    trip.emplace_back(n1 + s, n1 + s, -(p.mu - 2.0 * v[s] + t * p.c * ur * (1.0 + p.m * ur) / den2));
    trip.emplace_back(n1 + s, node, -t * p.c * v[s] * (1.0 + p.k * v[s]) / den2);
  }
  Eigen::SparseMatrix<double> j(n1 + n2, n1 + n2);
  j.setFromTriplets(trip.begin(), trip.end());
  j.makeCompressed();
  return j;
}

double stable_time_step(const ParamSet& p, const Field& u0, const Field& v0) {
  const double big_u = std::max(p.theta, max_of(u0));
  const double big_v = std::max(max_of(v0), p.mu_plus() + p.c * big_u);
  const double lipschitz = std::abs(p.theta) + std::abs(p.mu) + 2.0 * (big_u + big_v) + p.a * (1.0 / p.k + big_u) +
                           p.c * (1.0 + big_v);
  return std::min(0.1, 0.5 / lipschitz);
}

EvolveResult evolve(const CoupledModel& model, const Field& u0, const Field& v0, const EvolveOptions& options) {
  if (u0.size() != model.nu() || v0.size() != model.nv()) throw GeometryError("evolve: initial data has wrong size");
  if (min_of(u0) < 0.0 || min_of(v0) < 0.0) throw ParameterError("evolve: initial data must be nonnegative");
  if (!u0.allFinite() || !v0.allFinite()) throw ConvergenceError("evolve: initial data is not finite", INFINITY);
  if (options.dt < 0.0) throw ParameterError(fmt::format("evolve: dt must be positive, got {}", options.dt));
  if (!(options.t_max > 0.0)) throw ParameterError("evolve: t_max must be positive");

  const ParamSet& p = model.params();
  EvolveResult out;
  double dt = options.dt > 0.0 ? options.dt : stable_time_step(p, u0, v0);
  auto factor_u = std::make_unique<SpdFactorization>(model.op_omega(), dt * p.d1, Field(), 1.0);
  auto factor_v = std::make_unique<SpdFactorization>(model.op_omega1(), dt * p.d2, Field(), 1.0);

  Field u = u0;
  Field v = v0;
  double t = 0.0;
  const double sample_every = options.sample_every > 0.0 ? options.sample_every : options.t_max / 200.0;
  double next_sample = 0.0;
  double res = model.residual_norm(u, v);
  auto sample = [&] {
    out.series.push_back({t, min_of(u), max_of(u), min_of(v), max_of(v), res});
    next_sample += sample_every;
  };
  sample();

  Field fu, fv;
  bool converged = res <= options.steady_tol;
  while (!converged && t < options.t_max) {
    model.reaction(u, v, fu, fv);
    Field un = factor_u->solve(u + dt * fu);
    Field vn = factor_v->solve(v + dt * fv);
    if (!un.allFinite() || !vn.allFinite()) throw ConvergenceError(fmt::format("evolve: NaN/Inf at t = {}", t), res);
    const int clipped = static_cast<int>((un.array() < 0.0).count() + (vn.array() < 0.0).count());
    if (clipped > 0) {
      out.clip_count += clipped;
      if (out.dt_halvings < 30) {
        // Redo the step with half the time step.
        dt *= 0.5;
        ++out.dt_halvings;
        factor_u = std::make_unique<SpdFactorization>(model.op_omega(), dt * p.d1, Field(), 1.0);
        factor_v = std::make_unique<SpdFactorization>(model.op_omega1(), dt * p.d2, Field(), 1.0);
        continue;
      }
      un = un.cwiseMax(0.0);
      vn = vn.cwiseMax(0.0);
    }
    u = std::move(un);
    v = std::move(vn);
    t += dt;
    ++out.steps;
    if (out.steps % options.check_every == 0) {
      res = model.residual_norm(u, v);
      converged = res <= options.steady_tol;
    }
    if (t >= next_sample || converged) {
      if (out.steps % options.check_every != 0) res = model.residual_norm(u, v);
      sample();
    }
  }
  res = model.residual_norm(u, v);
  out.state = {std::move(u), std::move(v), res, StateSource::TimeMarch, out.steps, res <= options.steady_tol};
  out.t_end = t;
  out.dt = dt;
  return out;
}

SteadyState solve_steady(const CoupledModel& model, const Field& u_guess, const Field& v_guess,
                         const NewtonOptions& options, double t) {
  if (u_guess.size() != model.nu() || v_guess.size() != model.nv())
    throw GeometryError("solve_steady: guess has wrong size");
  if (min_of(u_guess) < 0.0 || min_of(v_guess) < 0.0) throw ParameterError("solve_steady: guess must be nonnegative");
  const double tol = options.tol > 0.0 ? options.tol : model.newton_tolerance();
  const int n1 = model.nu();
  const int n2 = model.nv();
  const ParamSet& p = model.params();
  // Iterates may dip this far below zero on the way to a boundary state.
  const double negative_slack = 1e-6 * std::max({1.0, p.theta, std::abs(p.mu)});

  Field x(n1 + n2);
  x << u_guess, v_guess;
  auto split_residual = [&](const Field& y, Field& r) {
    Field ru, rv;
    model.residual(y.head(n1), y.tail(n2), ru, rv, t);
    r.resize(n1 + n2);
    r << ru, rv;
  };
  Field r;
  split_residual(x, r);
  double res = max_abs(r);
  if (!std::isfinite(res)) throw ConvergenceError("solve_steady: NaN in residual", res);

  int steps = 0;
  int polish = 0;
  // One full step past the tolerance when it still lowers the residual:
  // near bifurcations a residual at tolerance leaves a visible error.
  while (res > tol || (steps > 0 && polish < 1)) {
    if (res <= tol) ++polish;
    if (steps >= options.max_steps)
      throw ConvergenceError(fmt::format("solve_steady: no convergence in {} steps", options.max_steps), res);
    const Eigen::SparseMatrix<double> jac = model.jacobian(x.head(n1), x.tail(n2), t);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(jac);
    if (lu.info() != Eigen::Success) throw SingularError("solve_steady: singular Jacobian");
    const Field delta = lu.solve(-r);
    if (lu.info() != Eigen::Success || !delta.allFinite()) throw SingularError("solve_steady: Jacobian solve failed");

    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h <= options.max_halvings; ++h, lambda *= 0.5) {
      Field trial = x + lambda * delta;
      if (min_of(trial) < -negative_slack) continue;
      Field rt;
      split_residual(trial, rt);
      const double nt = max_abs(rt);
      if (std::isfinite(nt) && nt < res) {
        x = std::move(trial);
        r = std::move(rt);
        res = nt;
        accepted = true;
        break;
      }
    }
    if (!accepted && res <= tol) break;
    ++steps;
    if (!accepted)
      throw ConvergenceError(fmt::format("solve_steady: divergence after {} halvings at step {}", options.max_halvings, steps),
                             res);
  }

  if (min_of(x) < 0.0) {
    x = x.cwiseMax(0.0);
    split_residual(x, r);
    res = max_abs(r);
    if (res > tol) throw ConvergenceError("solve_steady: converged outside the nonnegative cone", res);
  }
  return {x.head(n1), x.tail(n2), res, StateSource::Newton, steps, true};
}

std::vector<double> uniform_t_grid(int steps) {
  if (steps < 1) throw ParameterError("homotopy grid needs at least one step");
  std::vector<double> g(steps + 1);
  for (int i = 0; i <= steps; ++i) g[i] = static_cast<double>(i) / steps;
  return g;
}

HomotopyResult homotopy_t(const CoupledModel& model, const std::vector<double>& t_grid, const NewtonOptions& options) {
  const ParamSet& p = model.params();
  if (!(p.mu > 0.0)) throw ParameterError("homotopy_t needs mu > 0");
  if (t_grid.size() < 2 || t_grid.front() != 0.0 || t_grid.back() != 1.0 ||
      !std::is_sorted(t_grid.begin(), t_grid.end()) ||
      std::adjacent_find(t_grid.begin(), t_grid.end()) != t_grid.end())
    throw ParameterError("homotopy_t: t grid must increase strictly from 0 to 1");

  HomotopyResult out;
  const ScalarSolution aux = solve_aux_mu(model.mesh(), p);
  if (aux.classification != ScalarClass::Positive)
    throw ConvergenceError("homotopy_t: auxiliary problem has only the zero solution", aux.residual);
  Field u = aux.field;
  Field v = Field::Constant(model.nv(), p.mu);
  out.start = {u, v, model.residual_norm(u, v, 0.0), StateSource::Homotopy, aux.newton_steps, true};
  out.trace.push_back({0.0, out.start.residual, aux.newton_steps});

  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    SteadyState s;
    try {
      s = solve_steady(model, u, v, options, t);
    } catch (const Error& e) {
      throw ConvergenceError(fmt::format("homotopy_t: Newton failed at t = {}: {}", t, e.what()), INFINITY);
    }
    out.trace.push_back({t, s.residual, s.iterations});
    u = s.u;
    v = s.v;
  }
  out.state = {u, v, out.trace.back().residual, StateSource::Homotopy, out.trace.back().iterations, true};
  return out;
}

double default_eps_pos(const ParamSet& p) { return 1e-4 * std::max(1.0, p.theta); }

Outcome classify_outcome(const SteadyState& state, double eps_pos) {
  Outcome o;
  o.min_u = min_of(state.u);
  o.max_u = max_of(state.u);
  o.min_v = min_of(state.v);
  o.max_v = max_of(state.v);
  const bool up = o.min_u > eps_pos;
  const bool vp = o.min_v > eps_pos;
  o.label = up && vp ? OutcomeLabel::Coexistence
            : up     ? OutcomeLabel::PreyOnly
            : vp     ? OutcomeLabel::PredatorOnly
                     : OutcomeLabel::Extinct;
  return o;
}

BoundReport check_apriori(const SteadyState& state, const ParamSet& params, double eps_pos) {
  BoundReport b;
  const Outcome o = classify_outcome(state, eps_pos);
  b.min_u = o.min_u;
  b.max_u = o.max_u;
  b.min_v = o.min_v;
  b.max_v = o.max_v;
  b.tol = 1e-6 * std::max(1.0, params.theta);
  b.mu_plus = params.mu_plus();
  b.u_upper = params.theta;
  b.v_lower = b.mu_plus;
  b.v_upper = b.mu_plus + params.c * params.theta / (1.0 + params.m * params.theta + params.k * b.mu_plus);
  b.u_checked = o.label == OutcomeLabel::Coexistence || o.label == OutcomeLabel::PreyOnly;
  b.v_checked = o.label == OutcomeLabel::Coexistence || o.label == OutcomeLabel::PredatorOnly;
  if (b.u_checked) b.u_pass = b.min_u > 0.0 && b.max_u <= b.u_upper + b.tol;
  if (b.v_checked) b.v_pass = b.min_v > b.v_lower - b.tol && b.max_v <= b.v_upper + b.tol;
  return b;
}

double predator_integral(const CoupledModel& model, const SteadyState& state) {
  Field fu, fv;
  model.reaction(state.u, state.v, fu, fv);
  return model.op_omega1().integrate(fv);
}

}  // namespace refugium
