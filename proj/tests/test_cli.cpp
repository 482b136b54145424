#include <doctest.h>

#include <json.hpp>

#include "elab/report.hpp"

using namespace elab;

TEST_CASE("suite registry") {
  const auto names = suite_names();
  CHECK(std::find(names.begin(), names.end(), "fusion") != names.end());
  CHECK(std::find(names.begin(), names.end(), "all") != names.end());
  CHECK_THROWS_AS(run_suite("no-such-suite", 7), std::invalid_argument);
}

TEST_CASE("reports are deterministic for a fixed seed modulo the timestamp") {
  const SuiteResult a = run_suite("fusion", 7);
  const SuiteResult b = run_suite("fusion", 7);
  CHECK(strip_timestamp(suite_report_json(a)) == strip_timestamp(suite_report_json(b)));
  const auto j = nlohmann::json::parse(suite_report_json(a));
  CHECK(j.contains("metadata"));
  CHECK(j["suite"] == "fusion");
  CHECK(j["pass"].is_boolean());
  CHECK(j["checks"].is_array());
}

TEST_CASE("theta suite passes under the default tolerances") {
  const SuiteResult r = run_suite("theta", 7);
  CHECK(r.pass);
  for (const auto& c : r.checks) CHECK(c.residual < c.tol);
}
