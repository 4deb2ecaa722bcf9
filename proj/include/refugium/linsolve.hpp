#pragma once

#include "refugium/mesh.hpp"

#include <Eigen/SparseCholesky>

#include <memory>
#include <vector>

namespace refugium {

/// (diffusion * -Delta_h + diag(potential) + shift) x = rhs, in node form.
/// An empty potential means zero.
struct LinearSystem {
  const Operator* op = nullptr;
  double diffusion = 1.0;
  Field potential;
  double shift = 0.0;
  Field rhs;
};

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

inline constexpr double kDefaultLinearTol = 1e-10;

/// Jacobi-preconditioned conjugate gradients on the symmetric (mass-weighted)
/// form of the system. Throws SingularError on breakdown (a non-positive
/// curvature direction, i.e. the matrix is not SPD) and ConvergenceError on
/// the iteration cap.
Field solve_spd(const LinearSystem& system, double tol = kDefaultLinearTol, SolveStats* stats = nullptr,
                const Field* initial_guess = nullptr);

/// Symmetric matrix diffusion*K + M*diag(potential + shift).
Eigen::SparseMatrix<double> symmetric_matrix(const Operator& op, double diffusion, const Field& potential,
                                             double shift);

/// Sparse Cholesky of a fixed shifted operator for many right-hand sides
/// (implicit time steps reuse one factorization).
class SpdFactorization {
 public:
  SpdFactorization(const Operator& op, double diffusion, const Field& potential, double shift);
  /// Solves in node form: (diffusion * -Delta_h + potential + shift) x = rhs.
  Field solve(const Field& rhs) const;

 private:
  const Operator* op_;
  std::unique_ptr<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> llt_;
};

inline constexpr int kDenseOracleCap = 2000;

/// Full ascending spectrum of diffusion * -Delta_h + diag(potential), by dense
/// symmetric eigendecomposition of M^{-1/2}(diffusion K)M^{-1/2} + diag(potential).
std::vector<double> dense_spectrum_oracle(const Operator& op, const Field& potential, double diffusion = 1.0);

}  // namespace refugium
