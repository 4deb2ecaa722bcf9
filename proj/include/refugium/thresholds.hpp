#pragma once

#include "refugium/eigenpair.hpp"
#include "refugium/params.hpp"

#include <optional>
#include <string_view>

namespace refugium {

enum class Regime {
  PreySafeNoZone,
  CoexistPredicted,
  PreyExtinctPredicted,
  CoexistNegMu,
  PredatorExtinct,
  Indeterminate,
};

std::string_view regime_name(Regime r);

struct ThresholdReport {
  double theta0 = 0.0;
  std::optional<double> theta_star;  // defined for mu >= 0
  double theta1 = 0.0;
  std::optional<double> theta_neg;  // defined for -c/m < mu <= 0
  Regime regime = Regime::Indeterminate;
  Field q;   // a(x) mu / (1 + k mu)
  Field q0;  // 0 on the closed zone, theta0 elsewhere
};

/// a / k.
double theta0(const ParamSet& p);

/// a(x) mu / (1 + k mu).
Field predation_potential(const Mesh& mesh, const ParamSet& p);
/// 0 on the closed zone, a/k on Omega_1.
Field limit_potential(const Mesh& mesh, const ParamSet& p);

/// lambda_1(-d1 Delta + a(x) mu / (1 + k mu)) on Omega; exactly 0 at mu = 0.
double theta_star(const ParamSet& p, const Mesh& mesh, double tol = kDefaultEigenTol);

/// lambda_1(-d1 Delta + q0) on Omega.
double theta1(const ParamSet& p, const Mesh& mesh, double tol = kDefaultEigenTol);

/// -mu / (c + m mu) for -c/m < mu <= 0. Throws ParameterError outside, and
/// within 1e-9 c/m of the pole.
double theta_neg(const ParamSet& p);

/// Whether mu lies in (-c/m, 0] (all mu <= 0 when m = 0).
bool theta_neg_defined(const ParamSet& p);

/// The m-condition m <= (1 + k mu)^2 / (a mu) under which the
/// non-existence statement below theta_star holds.
bool handling_condition(const ParamSet& p);

/// Predicted outcome for (theta, mu). theta_star is only evaluated when mu > 0.
Regime classify_regime(const ParamSet& p, const Mesh& mesh, double tol = kDefaultEigenTol);

/// Same classification from already-computed thresholds.
Regime classify_regime(const ParamSet& p, double theta0_value, std::optional<double> theta_star_value);

ThresholdReport compute_thresholds(const ParamSet& p, const Mesh& mesh, double tol = kDefaultEigenTol);

}  // namespace refugium
