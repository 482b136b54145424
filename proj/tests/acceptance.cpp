// Acceptance suite: runs the ten desk-scale criteria and prints one
// pass/fail line each. Exit status is nonzero when any criterion fails.

#include <cstdio>

#include "elab/checks.hpp"

namespace {

struct Budget {
  const char* label;
  double seconds;
};

constexpr Budget kBudget[10] = {
    {"theta kernel identities", 1.0},
    {"weight-function triangularity and diagonals", 5.0},
    {"R-matrix axioms and the fundamental anchor", 30.0},
    {"Q-R relation, lambda-poles, coefficient relations", 60.0},
    {"qKZB compatibility and Weyl commutation", 60.0},
    {"weight-function resonance relations", 30.0},
    {"Bethe pipeline (eigen, resonance, vanishing)", 300.0},
    {"restricted face-model eigenvectors", 120.0},
    {"star-triangle equation", 30.0},
    {"fusion combinatorics", 10.0},
};

}  // namespace

int main(int argc, char** argv) {
  const uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 7;
  int failures = 0;
  for (int i = 1; i <= 10; ++i) {
    const elab::SuiteResult res = elab::run_acceptance(i, seed);
    double worst_margin = 0.0;
    const elab::CheckResult* worst = nullptr;
    for (const auto& c : res.checks) {
      const double margin = c.tol > 0 ? c.residual / c.tol : (c.pass ? 0.0 : 1e9);
      if (worst == nullptr || margin > worst_margin) {
        worst_margin = margin;
        worst = &c;
      }
    }
    const bool in_budget = res.seconds < kBudget[i - 1].seconds;
    const bool pass = res.pass && in_budget;
    if (!pass) ++failures;
    std::printf("criterion %2d [%s]: %-48s (%zu checks, %.2fs/%.0fs budget", i,
                pass ? "PASS" : "FAIL", kBudget[i - 1].label, res.checks.size(),
                res.seconds, kBudget[i - 1].seconds);
    if (worst != nullptr && worst->tol > 0)
      std::printf(", worst residual %.2e vs tol %.0e in '%s'", worst->residual,
                  worst->tol, worst->name.c_str());
    std::printf(")\n");
    if (!res.pass)
      for (const auto& c : res.checks)
        if (!c.pass)
          std::printf("    failed: %s  residual %.3e tol %.0e %s\n", c.name.c_str(),
                      c.residual, c.tol, c.detail.c_str());
  }
  if (failures == 0)
    std::printf("all 10 acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}
