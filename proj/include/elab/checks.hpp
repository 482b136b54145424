#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace elab {

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  uint64_t seed = 0;
  std::vector<CheckResult> checks;
  double seconds = 0.0;
  bool pass = true;

  void add(CheckResult c);
};

// Acceptance criteria 1..10; each runs the full stated check set.
SuiteResult run_acceptance(int criterion, uint64_t seed);

// Named suites for the CLI front end (map onto the criteria plus a few
// finer-grained groups).
std::vector<std::string> suite_names();
SuiteResult run_suite(const std::string& name, uint64_t seed);

}  // namespace elab
