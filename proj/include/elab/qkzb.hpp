#pragma once

#include "elab/zero_weight.hpp"

namespace elab {

// Linear operator on functions of lambda. `offsets` declares which
// lambda-shifts of the input one application may read (locality contract).
struct OperatorOnFn {
  SpacePtr in;
  SpacePtr out;
  std::function<ZeroWeightFn(const ZeroWeightFn&)> apply;
  std::vector<cplx> offsets;

  ZeroWeightFn operator()(const ZeroWeightFn& f) const { return apply(f); }
};

OperatorOnFn compose(const OperatorOnFn& a, const OperatorOnFn& b);  // a after b

// Gamma_j: shifts lambda by -2 eta (Lambda_j - 2 m_j) on each component. 1-based j.
OperatorOnFn gamma_j(const SpacePtr& space, int j);

// qKZB operator K_j(z, tau, p), its mirror variant, and the p = 0 family H_j.
OperatorOnFn kzb_operator(const SpacePtr& space, int j, cplx p);
OperatorOnFn mirror_kzb_operator(const SpacePtr& space, int j, cplx p);
OperatorOnFn h_operator(const SpacePtr& space, int j);

// s_j(z) = P^{(j,j+1)} R_{L_j,L_{j+1}}(z, lambda - 2 eta sum_{l<j} h^{(l)});
// output lives on the chain with slots j, j+1 swapped. 1-based j <= n-1.
OperatorOnFn s_operator(const SpacePtr& space, int j, cplx zarg);

// Delta = Gamma_1 P^{(1,2)} ... P^{(n-1,n)}; output chain cyclically rotated.
OperatorOnFn delta_operator(const SpacePtr& space);

// Weyl reflection (S f)(lambda) = (s_{L_1} x ... x s_{L_n}) f(-lambda) on
// integer-weight quotients.
OperatorOnFn weyl_reflection(const SpacePtr& space);

// Full reversal P: V_{L_1..L_n} -> V_{L_n..L_1} (used by the mirror identity).
OperatorOnFn reversal_operator(const SpacePtr& space);

// Transfer matrix T(w) f = a(w,.) f(.-2eta) + d(w,.) f(.+2eta) of the chain's
// L-operator; integer-weight chains only. The auxiliary space can sweep the
// factors in either direction: `geometric` (factor 1 first) is the trace /
// row-to-row convention of the face models, whose eigenfunctions are the
// plain weight-function assemblies; `chain` (factor n first) is the
// evaluation-module composition, whose eigenfunctions are the mirror ones.
enum class TransferOrder { geometric, chain };
OperatorOnFn transfer_operator(const SpacePtr& space, cplx w,
                               TransferOrder order = TransferOrder::geometric);

// max violation of the resonance relation C_which (1..n-1 two-sided family,
// n the wrap-around family) over all admissible (M, L, a, b) at the exact
// resonance lambda; (r, s) select the lattice translate.
double resonance_condition_residual(const ZeroWeightFn& u, int which, cplx p,
                                    int r = 0, int s = 0);

// residual helper: max_j max_lam |(A f_j)(lam) - (B f_j)(lam)| / scale over
// seeded test functions f_j and sample points.
double operator_residual(const OperatorOnFn& a, const OperatorOnFn& b,
                         int n_fns, std::span<const cplx> lambdas, uint64_t seed);

}  // namespace elab
