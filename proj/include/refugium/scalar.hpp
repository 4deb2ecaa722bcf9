#pragma once

#include "refugium/mesh.hpp"
#include "refugium/params.hpp"

#include <optional>
#include <string>
#include <vector>

namespace refugium {

enum class ScalarClass { Positive, Zero };

struct ScalarSolution {
  Field field;
  /// Max-norm of the discrete equation, recomputed after convergence.
  double residual = 0.0;
  ScalarClass classification = ScalarClass::Zero;
  int newton_steps = 0;
  /// Pseudo-transient steps taken when plain Newton did not settle.
  int marching_steps = 0;
  std::vector<double> trace;  // residual per accepted iteration
};

struct ScalarOptions {
  /// Convergence at residual <= rel_tol * max(1, theta).
  double rel_tol = 1e-9;
  int max_newton = 100;
  int max_halvings = 20;
  int max_marching = 20000;
  /// Below floor_factor * theta a node counts as zero.
  double floor_factor = 1e-12;
};

/// -d1 Delta u = u (theta - u - q(x)) with Neumann conditions. Default start
/// u = theta. Throws ConvergenceError when both Newton and the marching
/// fallback fail.
ScalarSolution solve_logistic(const Mesh& mesh, double theta, const Field& q, const std::optional<Field>& init = {},
                              double d1 = 1.0, const ScalarOptions& options = {});

/// -d1 Delta u = u (theta - u - a(x) mu / (1 + m u + k mu)), mu > 0.
ScalarSolution solve_aux_mu(const Mesh& mesh, const ParamSet& params, const std::optional<Field>& init = {},
                            const ScalarOptions& options = {});

/// Max-norm residual of the logistic problem with potential q at u.
double logistic_residual(const Operator& op, double theta, const Field& q, const Field& u, double d1 = 1.0);

/// Max-norm residual of the mu-dependent problem at u.
double aux_residual(const Mesh& mesh, const Operator& op, const ParamSet& params, const Field& u);

/// eps * theta * phi with phi the unit-normalized principal eigenfunction of
/// -d1 Delta + q: the small positive start used to approach from below.
Field subsolution_start(const Mesh& mesh, double theta, const Field& q, double d1 = 1.0, double eps = 0.01);

}  // namespace refugium
