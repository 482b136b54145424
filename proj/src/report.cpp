#include "elab/report.hpp"

#include <ctime>
#include <json.hpp>

namespace elab {

std::string suite_report_json(const SuiteResult& result, bool with_timestamp) {
  nlohmann::json j;
  j["suite"] = result.suite;
  j["seed"] = result.seed;
  j["pass"] = result.pass;
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : result.checks) {
    nlohmann::json cj;
    cj["name"] = c.name;
    cj["residual"] = c.residual;
    cj["tol"] = c.tol;
    cj["pass"] = c.pass;
    if (!c.detail.empty()) cj["detail"] = c.detail;
    checks.push_back(std::move(cj));
  }
  j["checks"] = checks;
  if (with_timestamp) {
    // wall-clock block; excluded from determinism comparisons
    char buf[64];
    const std::time_t now = std::time(nullptr);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    j["metadata"]["generated_at"] = buf;
    j["metadata"]["seconds"] = result.seconds;
  }
  return j.dump(2) + "\n";
}

std::string strip_timestamp(const std::string& report_json) {
  nlohmann::json j = nlohmann::json::parse(report_json);
  j.erase("metadata");
  return j.dump(2) + "\n";
}

}  // namespace elab
