#include "refugium/linsolve.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace refugium {

Eigen::SparseMatrix<double> symmetric_matrix(const Operator& op, double diffusion, const Field& potential,
                                             double shift) {
  const int n = op.size();
  Field diag = Field::Constant(n, shift);
  if (potential.size() != 0) {
    if (potential.size() != n) throw GeometryError("potential size does not match operator");
    diag += potential;
  }
  Eigen::SparseMatrix<double> a = diffusion * op.stiffness;
  Eigen::SparseMatrix<double> d(n, n);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(n);
  for (int k = 0; k < n; ++k) t.emplace_back(k, k, op.mass[k] * diag[k]);
  d.setFromTriplets(t.begin(), t.end());
  a += d;
  a.makeCompressed();
  return a;
}

Field solve_spd(const LinearSystem& system, double tol, SolveStats* stats, const Field* initial_guess) {
  if (system.op == nullptr) throw Error("solve_spd: no operator");
  const Operator& op = *system.op;
  const int n = op.size();
  if (system.rhs.size() != n) throw GeometryError("solve_spd: right-hand side size does not match operator");
  if (!(tol > 0.0)) throw Error("solve_spd: tolerance must be positive");

  const Eigen::SparseMatrix<double> a = symmetric_matrix(op, system.diffusion, system.potential, system.shift);
  const Field b = op.mass.cwiseProduct(system.rhs);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    if (stats) *stats = {0, 0.0};
    return Field::Zero(n);
  }

  Field inv_diag(n);
  for (int k = 0; k < n; ++k) {
    const double d = a.coeff(k, k);
    if (!(d > 0.0)) throw SingularError(fmt::format("solve_spd: nonpositive diagonal {} at row {}", d, k));
    inv_diag[k] = 1.0 / d;
  }

  Field x = initial_guess ? *initial_guess : Field::Zero(n);
  Field r = b - a * x;
  Field z = inv_diag.cwiseProduct(r);
  Field p = z;
  double rz = r.dot(z);
  const int cap = std::max(1000, 10 * n);
  int it = 0;
  double rel = r.norm() / bnorm;
  while (rel > tol) {
    if (it >= cap)
      throw ConvergenceError(fmt::format("solve_spd: no convergence after {} iterations", cap), rel);
    const Field ap = a * p;
    const double curvature = p.dot(ap);
    if (!(curvature > 0.0)) throw SingularError("solve_spd: breakdown, matrix is not positive definite");
    const double alpha = rz / curvature;
    x += alpha * p;
    r -= alpha * ap;
    z = inv_diag.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
    ++it;
    rel = r.norm() / bnorm;
    if (!std::isfinite(rel)) throw ConvergenceError("solve_spd: non-finite residual", rel);
  }
  // Recursive residuals drift; confirm with the true residual.
  rel = (b - a * x).norm() / bnorm;
  if (rel > 10.0 * tol) throw ConvergenceError("solve_spd: true residual above tolerance", rel);
  if (stats) *stats = {it, rel};
  return x;
}

SpdFactorization::SpdFactorization(const Operator& op, double diffusion, const Field& potential, double shift)
    : op_(&op), llt_(std::make_unique<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>()) {
  llt_->compute(symmetric_matrix(op, diffusion, potential, shift));
  if (llt_->info() != Eigen::Success) throw SingularError("sparse Cholesky failed: matrix is not positive definite");
}

Field SpdFactorization::solve(const Field& rhs) const {
  Field x = llt_->solve(op_->mass.cwiseProduct(rhs));
  if (llt_->info() != Eigen::Success) throw SingularError("sparse Cholesky solve failed");
  return x;
}

std::vector<double> dense_spectrum_oracle(const Operator& op, const Field& potential, double diffusion) {
  const int n = op.size();
  if (n > kDenseOracleCap)
    throw Error(fmt::format("dense oracle limited to {} unknowns, got {}", kDenseOracleCap, n));
  if (potential.size() != 0 && potential.size() != n) throw GeometryError("potential size does not match operator");
  const Field s = op.mass.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd a = diffusion * Eigen::MatrixXd(op.stiffness);
  a = s.asDiagonal() * a * s.asDiagonal();
  if (potential.size() != 0) a.diagonal() += potential;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("dense symmetric eigensolver failed");
  const Field ev = solver.eigenvalues();
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace refugium
