#pragma once

#include "refugium/mesh.hpp"

namespace refugium {

/// Principal eigenpair of diffusion * -Delta + q under Neumann conditions.
/// The eigenfunction has unit discrete L2 norm (sum M phi^2 = 1) and is
/// sign-fixed so its largest-magnitude entry is positive.
struct EigenPair {
  double value = 0.0;
  Field vector;
  int iterations = 0;
  double last_increment = 0.0;
  /// Every entry > 0. Can be false only for reducible operators, e.g. the two
  /// disconnected pieces of Omega_1 in 1D.
  bool strictly_positive = false;
};

inline constexpr double kDefaultEigenTol = 1e-10;

/// Inverse power iteration on (diffusion K + M (q - sigma)) with
/// sigma = min(q) - 1, stopped when successive Rayleigh quotients differ by
/// less than tol. Throws ConvergenceError on the iteration cap.
EigenPair principal_eigenpair(const Operator& op, const Field& q, double tol = kDefaultEigenTol,
                              double diffusion = 1.0);

EigenPair principal_eigenpair(const Mesh& mesh, Region region, const Field& q, double tol = kDefaultEigenTol,
                              double diffusion = 1.0);

/// (diffusion * integral |grad phi|^2 + integral q phi^2) / integral phi^2.
double rayleigh(const Operator& op, const Field& q, const Field& phi, double diffusion = 1.0);

}  // namespace refugium
