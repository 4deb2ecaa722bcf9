#pragma once

#include "refugium/config.hpp"

#include <ostream>
#include <string>

namespace refugium {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailed = 1,
  kExitConfigError = 2,
  kExitSolverFailed = 3,
};

struct CommandContext {
  RunConfig config;
  std::string out_dir;  // created when missing
  int threads = 1;
  std::ostream* console = nullptr;  // progress and summary; may be null
};

/// Each command writes report.txt plus its CSV files into out_dir and
/// returns an exit code. Errors from the solvers are caught and mapped to
/// kExitSolverFailed; configuration problems to kExitConfigError.
int cmd_thresholds(const CommandContext& ctx);
int cmd_steady(const CommandContext& ctx);
int cmd_sweep(const CommandContext& ctx);
int cmd_zones(const CommandContext& ctx);
int cmd_asymptotic(const CommandContext& ctx);
int cmd_verify(const CommandContext& ctx);

/// Dispatches by subcommand name; unknown names give kExitConfigError.
int run_command(const std::string& name, const CommandContext& ctx);

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(const std::string& text);

}  // namespace refugium
