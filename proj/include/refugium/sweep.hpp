#pragma once

#include "refugium/coupled.hpp"
#include "refugium/stability.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace refugium {

/// Knobs shared by every "find the steady state from these initial data" run.
struct SettleOptions {
  EvolveOptions evolve;
  NewtonOptions newton;
  double eps_pos = 0.0;  // 0: default_eps_pos(params)
  double eigen_tol = kDefaultEigenTol;
};

struct SettleResult {
  SteadyState state;
  EvolveResult march;
  bool march_converged = false;
  int newton_steps = 0;
};

/// Evolve to the steady tolerance, then polish with Newton. When the march
/// runs out of time Newton is still attempted from its last state unless
/// `require_march` is set.
SettleResult settle(const CoupledModel& model, const Field& u0, const Field& v0, const SettleOptions& options,
                    bool require_march = false);

struct BranchPoint {
  double parameter = 0.0;
  double min_u = 0, max_u = 0, min_v = 0, max_v = 0;
  double residual = 0.0;
  OutcomeLabel outcome = OutcomeLabel::Extinct;
  double eta_re = NAN;  // NaN when not requested
  bool ok = false;
  bool bounds_pass = false;
  std::string status = "ok";
  SteadyState state;
};

struct BifurcationEstimate {
  double theta_hat = NAN;
  std::string method;
  double predicted = NAN;
  double rel_gap = NAN;
  double bracket_lo = NAN;  // last non-coexistence grid value
  double bracket_hi = NAN;  // first coexistence grid value
};

struct SweepResult {
  std::vector<BranchPoint> points;
  std::optional<BifurcationEstimate> estimate;
  /// Largest max-norm jump between consecutive successful states.
  double max_jump = 0.0;
};

struct SweepOptions {
  bool warm_start = true;
  bool compute_eta = false;
  int threads = 1;
};

/// theta_grid must be strictly monotone (ascending or descending); the sweep
/// walks it in the given order. Per-point failures are recorded, not thrown.
SweepResult sweep_theta(const Mesh& mesh, const ParamSet& params, const std::vector<double>& theta_grid,
                        const SettleOptions& settle_options, const SweepOptions& sweep_options = {});

/// Where coexistence starts along a sweep: the quantity that vanishes is
/// min u when the non-coexistence side is predator-only and min v when it is
/// prey-only. It is extrapolated linearly to zero from the first two
/// coexistence points and clamped to the bracketing grid interval.
std::optional<BifurcationEstimate> detect_bifurcation(const std::vector<BranchPoint>& points);

/// Predicted onset: theta_star for mu > 0, theta_neg for -c/m < mu <= 0.
std::optional<double> predicted_onset(const Mesh& mesh, const ParamSet& params, double eigen_tol = kDefaultEigenTol);

struct AsymptoticRow {
  double mu = 0.0;
  double e_u = NAN;
  double e_v = NAN;
  double e_v_bound = NAN;  // c theta / (1 + m theta + k mu)
  double multistart_spread = NAN;
  double eta_re = NAN;
  Verdict verdict = Verdict::Marginal;
  OutcomeLabel outcome = OutcomeLabel::Extinct;
  bool bounds_pass = false;
  double integral = NAN;
  bool flagged = false;  // any non-coexistence start, or a failed solve
  std::string status = "ok";
  SteadyState state;
};

struct AsymptoticResult {
  std::vector<AsymptoticRow> rows;
  Field limit_prey;  // U_{theta,q0}
};

/// Initial data for the multi-start probe: index 0 is (theta, mu_+ + small),
/// 1 the scaled limit profile, 2.. seeded random positive fields.
std::pair<Field, Field> multistart_initial(const CoupledModel& model, int index, unsigned long long seed);

AsymptoticResult asymptotic_mu(const Mesh& mesh, const ParamSet& params, const std::vector<double>& mu_list,
                               const SettleOptions& settle_options, int starts = 3, unsigned long long seed = 12345,
                               int threads = 1);

struct ZoneRow {
  double half_width = 0.0;
  double zone_measure = 0.0;
  double theta_star = NAN;
  bool ok = false;
  std::string status = "ok";
};

struct ZoneStudy {
  std::vector<ZoneRow> rows;
  bool strictly_decreasing = false;
  double no_zone_limit = 0.0;  // a mu / (1 + k mu)
};

/// Centred square (or interval) zones of the given half-widths on the base
/// domain; theta_star per zone.
ZoneStudy zone_study(const DomainSpec& base, const std::vector<double>& half_widths, const ParamSet& params,
                     double eigen_tol = kDefaultEigenTol, int threads = 1);

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace refugium
