#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "elab/weights.hpp"

namespace elab {

// Dense block of R_{L1,L2}(z, lambda) on the weight space of level m.
// Rows/columns run over pairs (i, j), i + j = m, ascending i; the action is
// (R v)_{(k,l)} = sum_{(i,j)} entries(row(k,l), col(i,j)) v_{(i,j)}.
struct RMatrixBlock {
  cplx L1, L2;
  cplx z, lambda;
  int m = 0;
  std::vector<std::pair<int, int>> indices;
  Mat entries;

  int dim() const { return static_cast<int>(indices.size()); }
  int find(int i, int j) const;
  std::string dump_json() const;  // regression-fixture format
};

// alpha/beta entries of the fundamental R-matrix.
cplx fundamental_alpha(cplx z, cplx lambda, const EllipticParams& ep);
cplx fundamental_beta(cplx z, cplx lambda, const EllipticParams& ep);

// 4x4 fundamental R-matrix in the basis e0e0, e0e1, e1e0, e1e1.
Mat fundamental_rmatrix(cplx z, cplx lambda, const EllipticParams& ep);

// Level-m block of the fundamental R-matrix (m = 0, 1, 2).
RMatrixBlock fundamental_block(cplx z, cplx lambda, int m, const EllipticParams& ep);

// Geometric construction on Verma modules: R = At * A^{-1} from the two
// weight-function bases evaluated at the points T_L. Throws when a diagonal
// factor of the transition matrix vanishes (naming the factor).
RMatrixBlock build_rmatrix(cplx L1, cplx L2, cplx z, cplx lambda, int m,
                           const EllipticParams& ep);
// Same with explicit evaluation points z1, z2 (R depends only on z1 - z2).
RMatrixBlock build_rmatrix_at(cplx L1, cplx L2, cplx z1, cplx z2, cplx lambda,
                              int m, const EllipticParams& ep);

// Level-m block of R_{L1,L2} on the finite-dimensional quotients for integer
// weights, built by the fusion recursion from the fundamental R-matrix.
// Exact at integer weights (where the Verma transition matrices degenerate).
RMatrixBlock quotient_rmatrix(int L1, int L2, cplx z, cplx lambda, int m,
                              const EllipticParams& ep);

// Quotient block extracted from a Verma block: keeps indices i <= L1, j <= L2
// and reports the operator norm of the discarded coupling (leakage).
RMatrixBlock finite_dim_project(const RMatrixBlock& blk, int L1, int L2,
                                double* leakage = nullptr);

// sup norm of LHS-RHS of the dynamical Yang-Baxter equation on the direct sum
// of the levels 0..m of V_{L1} x V_{L2} x V_{L3} (quotients when finite).
struct ChainWeights {
  std::vector<cplx> lambdas;
  bool finite = false;            // all weights non-negative integers
  std::vector<int> int_lambdas;   // set when finite
};
double dybe_residual(const ChainWeights& w, cplx z, cplx zw, cplx lambda, int m,
                     const EllipticParams& ep);

double unitarity_residual(cplx L1, cplx L2, cplx z, cplx lambda, int m,
                          const EllipticParams& ep, bool finite = false);

// ----- Shapovalov operator -------------------------------------------------

// Q_k^Lambda(lambda), the k-th diagonal entry on one factor.
cplx shapovalov_q(int k, cplx Lambda, cplx lambda, const EllipticParams& ep);

// Diagonal entry Q_M(lambda) on the zero-weight space of the chain.
cplx shapovalov_qm(const WeightIndex& M, const std::vector<cplx>& lambdas,
                   cplx lambda, const EllipticParams& ep);

// One pole lambda_{M,j,l} of Q_M together with the index dual to M there.
struct ShapovalovPole {
  int j;  // 1-based factor label, j = n means the wrap-around family
  int l;
  cplx lambda0;
  WeightIndex dual;
};
std::vector<ShapovalovPole> shapovalov_poles(const WeightIndex& M,
                                             const std::vector<cplx>& lambdas,
                                             const EllipticParams& ep);

// The whole diagonal operator on the zero-weight space (sum Lambda_j = 2m):
// Q_M(lambda) and the pole set per index.
struct ShapovalovDiag {
  std::vector<WeightIndex> indices;
  std::vector<cplx> coefficients;
  std::vector<std::vector<ShapovalovPole>> poles;
};
ShapovalovDiag shapovalov(const std::vector<cplx>& lambdas, int m, cplx lambda,
                          const EllipticParams& ep);

// |LHS - RHS| of the Q-R relation tying R(z,-lambda) to R(z, lambda + shift).
double qr_relation_residual(int j, int k, int r, int s, cplx lambda, cplx L1,
                            cplx L2, cplx z, const EllipticParams& ep);

// ----- lambda-poles of the R-matrix ----------------------------------------

// Laurent coefficient a_{-order} of the block at pole0 by 32-point contour
// quadrature on a circle of radius `radius` (default 1e-3).
Mat rmatrix_laurent(cplx L1, cplx L2, cplx z, cplx pole0, int m, int order,
                    const EllipticParams& ep, double radius = 1e-3,
                    int points = 32);

// Residual of the residue-kernel relations: builds the kernel basis from the
// two-term relations at pole 2 eta (L1 - k) + r + s tau and returns
// max ||K u|| / ||K|| over that basis.
double residue_kernel_residual(cplx L1, cplx L2, cplx z, int k, int r, int s,
                               int m, const EllipticParams& ep);

// |LHS - RHS| of the matrix-coefficient relations (kind 1 or 2).
// kind 1 free indices: a, b, bp, c;  kind 2 free indices: a, ap, b, d.
double coeff_relation_residual(int kind, int a, int b, int bp_or_ap, int c_or_d,
                               int r, int s, cplx z, cplx w, cplx L1, cplx L2,
                               const EllipticParams& ep);

// 1/[j]! with the convention that it vanishes for negative j.
cplx inv_elliptic_factorial(int j, const EllipticParams& ep);

}  // namespace elab
