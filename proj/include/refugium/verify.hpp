#pragma once

#include "refugium/config.hpp"

#include <string>
#include <vector>

namespace refugium {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::vector<std::string> details;
};

struct VerifyOptions {
  DomainSpec domain = default_domain();
  SolverConfig solver;
  int threads = 1;
  /// Re-run everything and compare the report text (criterion 10).
  bool determinism = true;
  /// Criterion ids to run; empty runs all of them.
  std::vector<int> only;
};

struct VerifyReport {
  std::vector<CriterionResult> criteria;
  std::string text;  // the report file body, free of timings
  bool all_pass() const;
};

VerifyReport run_verify(const VerifyOptions& options);

}  // namespace refugium
