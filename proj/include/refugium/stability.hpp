#pragma once

#include "refugium/coupled.hpp"
#include "refugium/eigenpair.hpp"

#include <string>
#include <string_view>

namespace refugium {

/// Linearization of the steady system at (u, v). The eigenproblem is
///   d1(-Delta)phi = uu phi + uv psi + eta phi   on Omega
///   d2(-Delta)psi = vv psi + vu phi + eta psi   on Omega_1
/// with the coefficient fields below (uv on Omega nodes, vu on Omega_1 nodes).
struct LinearizedSystem {
  const CoupledModel* model = nullptr;
  Field uu;  // theta - 2u - a v (1 + k v) / D^2
  Field uv;  // -a u (1 + m u) / D^2, zero on the closed zone
  Field vv;  // mu - 2v + c u (1 + m u) / D^2
  Field vu;  // c v (1 + k v) / D^2

  int size() const { return static_cast<int>(uu.size() + vv.size()); }
};

enum class Verdict { Stable, Unstable, Marginal };
std::string_view verdict_name(Verdict v);

struct StabilityVerdict {
  double eta_re = 0.0;
  double eta_im = 0.0;
  Verdict verdict = Verdict::Marginal;
  std::string method;
  int iterations = 0;
  double marginal_band = 0.0;
};

LinearizedSystem linearize(const CoupledModel& model, const SteadyState& state);

/// Block matrix of the linearized operator in node form (eigenvalues are eta).
Eigen::SparseMatrix<double> linearized_matrix(const LinearizedSystem& system);

struct EtaOptions {
  double tol = 1e-10;
  int max_iterations = 3000;
  /// Cross-check the iterative answer with the dense spectrum when the
  /// unknown count allows it.
  bool dense_check = true;
};

/// Eigenvalue of smallest real part: inverse iteration with a real
/// Gershgorin shift, dense nonsymmetric fallback when that does not settle.
/// The verdict is marginal within 1e-6 max(1, theta) of zero.
StabilityVerdict principal_eta(const LinearizedSystem& system, const EtaOptions& options = {});

struct EtaStar {
  double eigen_value = 0.0;  // principal eigenvalue of -d1 Delta + 2U + q0 - theta
  double integral_ratio = 0.0;  // sum M U^2 phi* / sum M U phi*
  Field limit_prey;  // U_{theta,q0}
  Field eigenfunction;
};

/// Throws ParameterError when U_{theta,q0} is the zero solution.
EtaStar eta_star(const Mesh& mesh, const ParamSet& params, double tol = kDefaultEigenTol);

}  // namespace refugium
