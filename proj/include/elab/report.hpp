#pragma once

#include <optional>

#include "elab/checks.hpp"

namespace elab {

// exit-code contract of the batch front end
enum ExitCode : int {
  exit_ok = 0,
  exit_tolerance = 2,
  exit_solver = 3,
  exit_config = 4,
};

// JSON for a suite run: flat report with [re, im] pairs and a single
// metadata.generated_at field excluded from determinism comparisons.
std::string suite_report_json(const SuiteResult& result, bool with_timestamp = true);

// strip the declared metadata timestamp for byte comparisons
std::string strip_timestamp(const std::string& report_json);

}  // namespace elab
