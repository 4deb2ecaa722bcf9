#include "refugium/scalar.hpp"

#include "refugium/eigenpair.hpp"

#include <Eigen/SparseLU>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>

namespace refugium {

namespace {

// -d1 Delta u = u (theta - u - P(u)), P evaluated node-wise from a base field.
class ScalarProblem {
 public:
  using Potential = std::function<void(const Field& u, Field& p, Field& dp)>;

  ScalarProblem(const Operator& op, double theta, double d1, Potential potential)
      : op_(op), theta_(theta), d1_(d1), potential_(std::move(potential)) {}

  Field residual(const Field& u) const {
    Field p, dp;
    potential_(u, p, dp);
    return d1_ * op_.apply(u) - u.cwiseProduct((theta_ - u.array() - p.array()).matrix());
  }

  // M (J + shift I), symmetric; J = d1(-Delta_h) - diag(theta - 2u - P - u P').
  Eigen::SparseMatrix<double> scaled_jacobian(const Field& u, double shift) const {
    Field p, dp;
    potential_(u, p, dp);
    Eigen::SparseMatrix<double> a = d1_ * op_.stiffness;
    const Field diag =
        shift - (theta_ - 2.0 * u.array() - p.array() - u.array() * dp.array()).matrix().array();
    for (int k = 0; k < op_.size(); ++k) a.coeffRef(k, k) += op_.mass[k] * diag[k];
    a.makeCompressed();
    return a;
  }

  Field step(const Field& u, const Field& f, double shift) const {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(scaled_jacobian(u, shift));
    if (lu.info() != Eigen::Success) throw SingularError("scalar Newton: singular Jacobian");
    Field delta = lu.solve(-op_.mass.cwiseProduct(f));
    if (lu.info() != Eigen::Success || !delta.allFinite()) throw SingularError("scalar Newton: linear solve failed");
    return delta;
  }

  Field potential_at_zero() const {
    Field p, dp;
    potential_(Field::Zero(op_.size()), p, dp);
    return p;
  }

  const Operator& op() const { return op_; }
  double theta() const { return theta_; }
  double d1() const { return d1_; }

 private:
  const Operator& op_;
  double theta_;
  double d1_;
  Potential potential_;
};

enum class NewtonEnd { Converged, Collapsed, Stalled };

struct NewtonRun {
  NewtonEnd end = NewtonEnd::Stalled;
  Field u;
  double residual = INFINITY;
  int steps = 0;
};

NewtonRun damped_newton(const ScalarProblem& prob, Field u, double tol, double floor, const ScalarOptions& opt,
                        std::vector<double>& trace) {
  NewtonRun run;
  Field f = prob.residual(u);
  double res = max_abs(f);
  if (!std::isfinite(res)) throw ConvergenceError("scalar Newton: NaN in residual", res);
  // A field of order tol satisfies the equation to tolerance; keep stepping
  // so an iterate heading for the zero state actually reaches the floor.
  const double small = 1e-6 * prob.theta();
  int extra = 0;
  for (int it = 0; it < opt.max_newton; ++it) {
    if (res <= tol && (max_of(u) >= small || ++extra > 5)) {
      run.end = NewtonEnd::Converged;
      break;
    }
    if (max_of(u) < floor) {
      run.end = NewtonEnd::Collapsed;
      break;
    }
    Field delta;
    try {
      delta = prob.step(u, f, 0.0);
    } catch (const SingularError&) {
      break;
    }
    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opt.max_halvings; ++h, lambda *= 0.5) {
      Field trial = u + lambda * delta;
      Field ft = prob.residual(trial);
      const double rt = max_abs(ft);
      if (std::isfinite(rt) && rt < res) {
        u = std::move(trial);
        f = std::move(ft);
        res = rt;
        accepted = true;
        break;
      }
    }
    ++run.steps;
    if (!accepted) break;
    trace.push_back(res);
  }
  if (run.end == NewtonEnd::Stalled && res <= tol) run.end = NewtonEnd::Converged;
  if (run.end == NewtonEnd::Stalled && max_of(u) < floor) run.end = NewtonEnd::Collapsed;
  run.u = std::move(u);
  run.residual = res;
  return run;
}

// Pseudo-transient continuation: implicit Euler along the flow u_t = -F(u)
// with switched-evolution-relaxation step growth; becomes Newton as dt grows.
NewtonRun march(const ScalarProblem& prob, Field u, double tol, double floor, const ScalarOptions& opt,
                std::vector<double>& trace) {
  NewtonRun run;
  Field f = prob.residual(u);
  double res = max_abs(f);
  double dt = 0.1 / std::max(1.0, prob.theta());
  for (int it = 0; it < opt.max_marching && res > tol; ++it) {
    Field delta;
    try {
      delta = prob.step(u, f, 1.0 / dt);
    } catch (const SingularError&) {
      dt *= 0.5;
      continue;
    }
    Field trial = u + delta;
    if (!trial.allFinite() || min_of(trial) < 0.0) {
      dt *= 0.5;
      if (dt < 1e-14) throw ConvergenceError("scalar marching: step size underflow", res);
      continue;
    }
    Field ft = prob.residual(trial);
    const double rt = max_abs(ft);
    if (!std::isfinite(rt)) throw ConvergenceError("scalar marching: NaN in residual", res);
    dt = std::min(dt * std::clamp(res / std::max(rt, 1e-300), 0.5, 10.0), 1e12);
    u = std::move(trial);
    f = std::move(ft);
    res = rt;
    ++run.steps;
    trace.push_back(res);
  }
  run.u = std::move(u);
  run.residual = res;
  run.end = res <= tol ? (max_of(run.u) < floor ? NewtonEnd::Collapsed : NewtonEnd::Converged) : NewtonEnd::Stalled;
  return run;
}

// Extra full Newton steps past the tolerance, kept while the residual drops.
// Near a bifurcation the Jacobian is nearly singular, so a residual at
// tolerance can still leave a visible error in the field.
void polish(const ScalarProblem& prob, NewtonRun& run, int steps) {
  Field f = prob.residual(run.u);
  for (int i = 0; i < steps; ++i) {
    Field trial;
    try {
      trial = run.u + prob.step(run.u, f, 0.0);
    } catch (const SingularError&) {
      return;
    }
    Field ft = prob.residual(trial);
    const double rt = max_abs(ft);
    if (!(rt < run.residual)) return;
    run.u = std::move(trial);
    f = std::move(ft);
    run.residual = rt;
  }
}

ScalarSolution solve_scalar(const ScalarProblem& prob, const std::optional<Field>& init, const ScalarOptions& opt) {
  const double theta = prob.theta();
  if (!(theta > 0.0)) throw ParameterError(fmt::format("theta must be positive, got {}", theta));
  const int n = prob.op().size();
  Field u0 = init ? *init : Field::Constant(n, theta);
  if (u0.size() != n) throw GeometryError("scalar solve: initial field has the wrong size");
  const double tol = opt.rel_tol * std::max(1.0, theta);
  const double floor = opt.floor_factor * theta;

  ScalarSolution sol;
  NewtonRun run = damped_newton(prob, u0, tol, floor, opt, sol.trace);
  sol.newton_steps = run.steps;

  bool need_march = run.end == NewtonEnd::Stalled;
  if (run.end == NewtonEnd::Converged && min_of(run.u) <= floor && max_of(run.u) >= floor) need_march = true;
  if (run.end == NewtonEnd::Collapsed && min_of(u0) > 0.0) {
    // A collapse is only the answer when the zero state is stable.
    const double lambda = principal_eigenpair(prob.op(), prob.potential_at_zero(), kDefaultEigenTol, prob.d1()).value;
    if (lambda < theta) need_march = true;
  }
  if (need_march) {
    Field start = u0.cwiseMax(0.0);
    if (max_of(start) < floor) start = Field::Constant(n, theta);
    run = march(prob, start, tol, floor, opt, sol.trace);
    sol.marching_steps = run.steps;
    if (run.end == NewtonEnd::Stalled)
      throw ConvergenceError(fmt::format("scalar solve: no convergence (residual {:.3e})", run.residual), run.residual);
  }

  if (run.end == NewtonEnd::Converged) polish(prob, run, 2);

  if (run.end == NewtonEnd::Collapsed) {
    sol.field = Field::Zero(n);
    sol.classification = ScalarClass::Zero;
  } else {
    if (min_of(run.u) <= floor)
      throw ConvergenceError("scalar solve: converged to a sign-changing or partially vanishing field", run.residual);
    sol.field = std::move(run.u);
    sol.classification = ScalarClass::Positive;
  }
  sol.residual = max_abs(prob.residual(sol.field));
  return sol;
}

}  // namespace

double logistic_residual(const Operator& op, double theta, const Field& q, const Field& u, double d1) {
  return max_abs(d1 * op.apply(u) - u.cwiseProduct((theta - u.array() - q.array()).matrix()));
}

double aux_residual(const Mesh& mesh, const Operator& op, const ParamSet& params, const Field& u) {
  const Field a = predation_field(mesh, params.a);
  const Field p = (a.array() * params.mu / (1.0 + params.m * u.array() + params.k * params.mu)).matrix();
  return logistic_residual(op, params.theta, p, u, params.d1);
}

ScalarSolution solve_logistic(const Mesh& mesh, double theta, const Field& q, const std::optional<Field>& init,
                              double d1, const ScalarOptions& options) {
  if (q.size() != mesh.node_count()) throw GeometryError("solve_logistic: potential has the wrong size");
  if (!q.allFinite()) throw ParameterError("solve_logistic: potential must be bounded");
  const Operator op = neumann_laplacian(mesh, Region::Omega);
  ScalarProblem prob(op, theta, d1, [&q](const Field& u, Field& p, Field& dp) {
    p = q;
    dp = Field::Zero(u.size());
  });
  return solve_scalar(prob, init, options);
}

ScalarSolution solve_aux_mu(const Mesh& mesh, const ParamSet& params, const std::optional<Field>& init,
                            const ScalarOptions& options) {
  params.validate();
  if (!(params.mu > 0.0)) throw ParameterError(fmt::format("solve_aux_mu needs mu > 0, got {}", params.mu));
  const Operator op = neumann_laplacian(mesh, Region::Omega);
  const Field a = predation_field(mesh, params.a);
  const double mu = params.mu;
  const double m = params.m;
  const double k = params.k;
  ScalarProblem prob(op, params.theta, params.d1, [&a, mu, m, k](const Field& u, Field& p, Field& dp) {
    const Eigen::ArrayXd denom = 1.0 + m * u.array() + k * mu;
    p = (a.array() * mu / denom).matrix();
    dp = (-a.array() * mu * m / denom.square()).matrix();
  });
  return solve_scalar(prob, init, options);
}

Field subsolution_start(const Mesh& mesh, double theta, const Field& q, double d1, double eps) {
  const EigenPair pair = principal_eigenpair(mesh, Region::Omega, q, kDefaultEigenTol, d1);
  return eps * theta * pair.vector;
}

}  // namespace refugium
