#pragma once

#include "refugium/mesh.hpp"
#include "refugium/params.hpp"
#include "refugium/sweep.hpp"

#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace refugium {

/// Malformed or inconsistent configuration. line() is 0 when the problem is
/// not tied to a single line.
class ConfigError : public Error {
 public:
  ConfigError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

struct SolverConfig {
  double eigen_tol = kDefaultEigenTol;
  double dt = 0.0;  // 0: automatic
  double t_max = 2000.0;
  double steady_tol = 1e-9;
  double newton_tol = 0.0;  // 0: model default
  double eps_pos = 0.0;     // 0: 1e-4 max(1, theta)
  int newton_max_steps = 100;
  int newton_max_halvings = 10;
  int multistart = 3;
  unsigned long long seed = 12345;

  SettleOptions settle_options() const;
};

struct SweepConfig {
  std::vector<double> theta_grid;  // explicit grid; overrides the range keys
  std::optional<double> theta_min;
  std::optional<double> theta_max;
  int theta_points = 40;
  bool descending = false;
  bool warm_start = true;
  bool compute_eta = false;
  std::vector<double> mu_list{8, 16, 32, 64};
  std::vector<double> zone_widths;  // half-widths; empty: built-in ladder
};

struct RunConfig {
  DomainSpec domain;
  ParamSet params;
  SolverConfig solver;
  SweepConfig sweep;
  std::string output_dir = ".";

  bool has_domain = false;
  bool has_params = false;
  bool has_solver = false;
  bool has_sweep = false;
};

/// The built-in domain: [0,1] with 201 nodes and zone [0.25, 0.75].
DomainSpec default_domain();

/// Sectioned key = value text. Sections: [domain], [params], [solver],
/// [sweep], [output]. '#' starts a comment. Unknown sections and keys,
/// duplicates and bad values throw ConfigError.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

}  // namespace refugium
