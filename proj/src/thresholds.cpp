#include "refugium/thresholds.hpp"

#include <fmt/format.h>

#include <cmath>

namespace refugium {

void ParamSet::validate() const {
  const double all[] = {theta, mu, a, c, m, k, d1, d2};
  for (double v : all)
    if (!std::isfinite(v)) throw ParameterError("parameters must be finite");
  if (!(theta > 0.0)) throw ParameterError(fmt::format("theta must be positive, got {}", theta));
  if (!(a >= 0.0)) throw ParameterError(fmt::format("a must be nonnegative, got {}", a));
  if (!(c > 0.0)) throw ParameterError(fmt::format("c must be positive, got {}", c));
  if (!(m >= 0.0)) throw ParameterError(fmt::format("m must be nonnegative, got {}", m));
  if (!(k > 0.0)) throw ParameterError(fmt::format("k must be positive, got {}", k));
  if (!(d1 > 0.0) || !(d2 > 0.0)) throw ParameterError("diffusion rates must be positive");
}

std::string_view regime_name(Regime r) {
  switch (r) {
    case Regime::PreySafeNoZone: return "PREY_SAFE_NO_ZONE";
    case Regime::CoexistPredicted: return "COEXIST_PREDICTED";
    case Regime::PreyExtinctPredicted: return "PREY_EXTINCT_PREDICTED";
    case Regime::CoexistNegMu: return "COEXIST_NEG_MU";
    case Regime::PredatorExtinct: return "PREDATOR_EXTINCT";
    case Regime::Indeterminate: return "INDETERMINATE";
  }
  return "INDETERMINATE";
}

double theta0(const ParamSet& p) {
  if (!(p.k > 0.0)) throw ParameterError("theta0 needs k > 0");
  return p.a / p.k;
}

Field predation_potential(const Mesh& mesh, const ParamSet& p) {
  return predation_field(mesh, p.a) * (p.mu / (1.0 + p.k * p.mu));
}

Field limit_potential(const Mesh& mesh, const ParamSet& p) { return predation_field(mesh, theta0(p)); }

double theta_star(const ParamSet& p, const Mesh& mesh, double tol) {
  if (p.mu < 0.0) throw ParameterError(fmt::format("theta_star is defined for mu >= 0, got {}", p.mu));
  if (p.mu == 0.0) return 0.0;
  return principal_eigenpair(mesh, Region::Omega, predation_potential(mesh, p), tol, p.d1).value;
}

double theta1(const ParamSet& p, const Mesh& mesh, double tol) {
  return principal_eigenpair(mesh, Region::Omega, limit_potential(mesh, p), tol, p.d1).value;
}

bool theta_neg_defined(const ParamSet& p) {
  if (p.mu > 0.0) return false;
  if (p.m == 0.0) return true;
  const double pole = -p.c / p.m;
  return p.mu > pole + 1e-9 * p.c / p.m;
}

double theta_neg(const ParamSet& p) {
  if (!theta_neg_defined(p))
    throw ParameterError(fmt::format("theta_neg needs -c/m < mu <= 0 (away from the pole), got mu = {}", p.mu));
  if (p.mu == 0.0) return 0.0;
  return -p.mu / (p.c + p.m * p.mu);
}

bool handling_condition(const ParamSet& p) {
  if (p.a == 0.0 || p.mu <= 0.0) return true;
  const double s = 1.0 + p.k * p.mu;
  return p.m <= s * s / (p.a * p.mu);
}

Regime classify_regime(const ParamSet& p, double theta0_value, std::optional<double> theta_star_value) {
  if (p.mu <= 0.0) {
    if (p.m > 0.0 && p.mu <= -p.c / p.m) return Regime::PredatorExtinct;
    // Values within 1e-9 c/m of the pole still have v -> 0; theta_neg -> infinity there.
    if (!theta_neg_defined(p)) return Regime::PredatorExtinct;
    return p.theta > theta_neg(p) ? Regime::CoexistNegMu : Regime::PredatorExtinct;
  }
  if (p.theta >= theta0_value) return Regime::PreySafeNoZone;
  if (!theta_star_value) throw Error("classify_regime: theta_star required for mu > 0");
  if (p.theta > *theta_star_value) return Regime::CoexistPredicted;
  return handling_condition(p) ? Regime::PreyExtinctPredicted : Regime::Indeterminate;
}

Regime classify_regime(const ParamSet& p, const Mesh& mesh, double tol) {
  std::optional<double> ts;
  const double t0 = theta0(p);
  if (p.mu > 0.0 && p.theta < t0) ts = theta_star(p, mesh, tol);
  return classify_regime(p, t0, ts);
}

ThresholdReport compute_thresholds(const ParamSet& p, const Mesh& mesh, double tol) {
  p.validate();
  ThresholdReport r;
  r.theta0 = theta0(p);
  r.q = predation_potential(mesh, p);
  r.q0 = limit_potential(mesh, p);
  if (p.mu >= 0.0) r.theta_star = theta_star(p, mesh, tol);
  r.theta1 = principal_eigenpair(mesh, Region::Omega, r.q0, tol, p.d1).value;
  if (theta_neg_defined(p)) r.theta_neg = theta_neg(p);
  r.regime = classify_regime(p, r.theta0, r.theta_star);
  return r;
}

}  // namespace refugium
