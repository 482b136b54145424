#pragma once

#include <optional>
#include <string>

#include "elab/fusion.hpp"
#include "elab/qkzb.hpp"

namespace elab {

enum class BetheVariant {
  h_type,           // prod theta(t-z+eta L)/theta(t-z-eta L) ... = e^{-4 eta c}
  transfer,         // shifted arguments, RHS e^{+4 eta c}
  fundamental_irf,  // h_type with all weights 1
};

struct BetheProblem {
  BetheVariant variant = BetheVariant::h_type;
  ModelParams model;
  cplx c{0.0, 0.0};
  int m = 0;
};

struct BetheSolution {
  std::vector<cplx> roots;  // canonical order (sorted, Re reduced to [0,1))
  double residual = 0.0;    // max |product form - RHS|
  std::vector<std::string> trace;
  bool ok = false;
};

// per-root deviation of the product form from the right-hand side
Vec bae_residual(const BetheProblem& pb, std::span<const cplx> roots);
// wrapped logarithmic form (the quantity the Newton iteration drives to 0)
Vec bae_log_residual(const BetheProblem& pb, std::span<const cplx> roots);

struct SolveOptions {
  int newton_iters = 60;
  double target = 1e-13;     // on the wrapped log form
  int continuation_steps = 24;
  double start_im_tau = 3.0;  // trigonometric end of the homotopy
  int multistart = 24;
  uint64_t seed = 2024;
};

// Newton on the wrapped log form with analytic Jacobian, seeded at the
// trigonometric limit and continued in tau. Throws nothing; inspect .ok.
BetheSolution solve_bae(const BetheProblem& pb, const SolveOptions& opt = {});
// all distinct solutions the multistart reaches, best residual first
std::vector<BetheSolution> solve_bae_all(const BetheProblem& pb,
                                         const SolveOptions& opt = {});
// polish explicit seeds at the target parameters (no continuation)
BetheSolution solve_bae_from(const BetheProblem& pb, std::span<const cplx> seeds,
                             const SolveOptions& opt = {});

// psi(lambda) = sum_J e^{c lambda} omega_J(t, lambda) e_J on the given space
// (Verma or quotient); normalized so the largest coefficient at a fixed
// reference lambda is 1.
ZeroWeightFn eigenfunction_h(const BetheSolution& sol, const SpacePtr& space, cplx c);

// transfer-matrix eigenfunction from mirror weight functions (bae2 roots);
// the mirror functions are evaluated at t - eta.
ZeroWeightFn eigenfunction_transfer(const BetheSolution& sol, const SpacePtr& space, cplx c);

// eigenvalues
cplx h_eigenvalue(const BetheProblem& pb, std::span<const cplx> roots, int j);
cplx transfer_eigenvalue_verma(const BetheProblem& pb, std::span<const cplx> roots, cplx w);
cplx transfer_eigenvalue_fundamental(const BetheProblem& pb, std::span<const cplx> roots, cplx w);

// A psi = psi - S psi (quotient spaces)
ZeroWeightFn antisymmetrize(const ZeroWeightFn& psi);

// Resonance relations of transfer-matrix eigenfunctions (mirror-type
// coordinates): which in 2..n checks the slot pair (which-1, which) with the
// suffix dynamical sums; which = 1 checks the wrap-around family. Relative.
double transfer_resonance_residual(const ZeroWeightFn& psi, int which);

// Resonance relations of H-type eigenfunctions in reduced form (equal
// coefficients at the resonance points); relative residual.
double h_resonance_residual(const ZeroWeightFn& psi, int which);

struct VanishingRow {
  WeightIndex M;
  int k = 0;
  double magnitude = 0.0;
  bool forced = false;
};
struct VanishingReport {
  std::vector<VanishingRow> rows;
  double max_forced = 0.0;    // largest |A psi_M(2 eta k)| among forced rows
  double min_unforced = 0.0;  // smallest among unforced rows
};

// Evaluates the reduced coefficients of A psi at lambda = 2 eta k and flags
// the entries forced to vanish. With N > 0 the root-of-unity rules apply and
// k runs over 0..N-1; otherwise k covers the two-sided fusion window.
// The ordinary kind (prefix sums) governs plain weight-function assemblies,
// the modified kind (suffix sums) the mirror ones.
VanishingReport vanishing_report(const ZeroWeightFn& apsi, std::optional<int> N, cplx c,
                                 FusionKind kind = FusionKind::ordinary);

}  // namespace elab
