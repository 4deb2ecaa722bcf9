#pragma once

#include "refugium/mesh.hpp"
#include "refugium/params.hpp"

#include <Eigen/SparseCore>

#include <string_view>
#include <vector>

namespace refugium {

enum class StateSource { Newton, TimeMarch, Homotopy };
std::string_view source_name(StateSource s);

/// (u on Omega, v on Omega_1) with solver metadata.
struct SteadyState {
  Field u;
  Field v;
  double residual = INFINITY;
  StateSource source = StateSource::Newton;
  int iterations = 0;
  bool converged = false;
};

/// Shared, immutable discretization of the coupled problem.
class CoupledModel {
 public:
  CoupledModel(const Mesh& mesh, const ParamSet& params);

  const Mesh& mesh() const { return *mesh_; }
  const ParamSet& params() const { return params_; }
  const Operator& op_omega() const { return op_omega_; }
  const Operator& op_omega1() const { return op_omega1_; }
  const Field& predation() const { return a_; }
  int nu() const { return mesh_->node_count(); }
  int nv() const { return mesh_->omega1_count(); }

  /// Reaction terms u(theta - u - a v/D) on Omega and v(mu - v + t c u/D) on
  /// Omega_1, with v extended by 0 into the zone and u restricted to Omega_1.
  void reaction(const Field& u, const Field& v, Field& fu, Field& fv, double t = 1.0) const;

  /// Node-wise residuals d(-Delta_h)w - f(w) of the steady equations.
  void residual(const Field& u, const Field& v, Field& ru, Field& rv, double t = 1.0) const;
  double residual_norm(const Field& u, const Field& v, double t = 1.0) const;

  /// Analytic Jacobian of the residual in node form, unknowns ordered (u, v).
  Eigen::SparseMatrix<double> jacobian(const Field& u, const Field& v, double t = 1.0) const;

  /// 1e-10 * max(1, theta, |mu|).
  double newton_tolerance() const;

 private:
  const Mesh* mesh_;
  ParamSet params_;
  Operator op_omega_;
  Operator op_omega1_;
  Field a_;
};

struct EvolveOptions {
  double dt = 0.0;  // 0: automatic, from the reaction stiffness
  double t_max = 2000.0;
  double steady_tol = 1e-9;
  int check_every = 10;
  /// Sampling interval of the time series; 0 picks t_max / 200.
  double sample_every = 0.0;
};

struct TimeSample {
  double t;
  double min_u, max_u, min_v, max_v;
  double residual;
};

struct EvolveResult {
  SteadyState state;
  std::vector<TimeSample> series;
  double t_end = 0.0;
  double dt = 0.0;
  int steps = 0;
  int clip_count = 0;
  int dt_halvings = 0;
};

/// Largest step the explicit reaction treatment tolerates for these
/// parameters and initial data without overshooting below zero.
double stable_time_step(const ParamSet& p, const Field& u0, const Field& v0);

/// Semi-implicit Euler: diffusion implicit, reaction explicit. Stops once the
/// steady residual drops below steady_tol; otherwise runs to t_max and leaves
/// state.converged false. Throws ConvergenceError on NaN/Inf.
EvolveResult evolve(const CoupledModel& model, const Field& u0, const Field& v0, const EvolveOptions& options = {});

struct NewtonOptions {
  int max_steps = 100;
  int max_halvings = 10;
  /// 0: use CoupledModel::newton_tolerance().
  double tol = 0.0;
};

/// Damped Newton on the steady system. Throws ConvergenceError on divergence
/// and SingularError when the Jacobian is singular (bifurcation points).
SteadyState solve_steady(const CoupledModel& model, const Field& u_guess, const Field& v_guess,
                         const NewtonOptions& options = {}, double t = 1.0);

struct HomotopyStep {
  double t;
  double residual;
  int iterations;
};

struct HomotopyResult {
  SteadyState state;  // at t = 1
  SteadyState start;  // at t = 0: (aux solution, mu)
  std::vector<HomotopyStep> trace;
};

/// Continuation in the conversion factor t from 0 to 1. t_grid must start at
/// 0, end at 1, and increase.
HomotopyResult homotopy_t(const CoupledModel& model, const std::vector<double>& t_grid,
                          const NewtonOptions& options = {});

/// Uniform t grid with `steps` intervals.
std::vector<double> uniform_t_grid(int steps);

struct BoundReport {
  bool u_checked = false;
  bool v_checked = false;
  bool u_pass = true;
  bool v_pass = true;
  double min_u = 0, max_u = 0, min_v = 0, max_v = 0;
  double u_upper = 0;  // theta
  double v_lower = 0;  // mu_+
  double v_upper = 0;  // mu_+ + c theta / (1 + m theta + k mu_+)
  double tol = 0;
  double mu_plus = 0;
  bool pass() const { return u_pass && v_pass; }
};

enum class OutcomeLabel { Coexistence, PreyOnly, PredatorOnly, Extinct };
std::string_view outcome_name(OutcomeLabel o);

struct Outcome {
  OutcomeLabel label = OutcomeLabel::Extinct;
  double min_u = 0, max_u = 0, min_v = 0, max_v = 0;
};

/// 1e-4 * max(1, theta).
double default_eps_pos(const ParamSet& p);

Outcome classify_outcome(const SteadyState& state, double eps_pos);

/// A priori bounds 0 < u <= theta and mu_+ < v <= mu_+ + c theta/(1 + m theta + k mu_+)
/// with tol = 1e-6 max(1, theta); semitrivial states get only the applicable check.
BoundReport check_apriori(const SteadyState& state, const ParamSet& params, double eps_pos);

/// Lumped-mass sum over Omega_1 of v (mu - v + c u / D). Vanishes for exact
/// discrete steady states because the stiffness has zero column sums.
double predator_integral(const CoupledModel& model, const SteadyState& state);

}  // namespace refugium
