#pragma once

namespace refugium {

/// Model constants of the predator-prey system with Beddington-DeAngelis
/// response a u v / (1 + m u + k v).
struct ParamSet {
  double theta = 1.0;  // prey birth rate
  double mu = 1.0;     // predator growth rate, any sign
  double a = 2.0;      // predation rate outside the zone
  double c = 1.0;      // conversion rate
  double m = 1.0;      // handling time
  double k = 1.0;      // prey refuge ability
  double d1 = 1.0;
  double d2 = 1.0;

  /// Throws ParameterError when an invariant fails.
  void validate() const;
  double mu_plus() const { return mu > 0.0 ? mu : 0.0; }
};

}  // namespace refugium
