#pragma once

#include <map>

#include "elab/bethe.hpp"

namespace elab {

// Admissible height path |a_1,...,a_n> (cyclic, steps of +-1).
struct IrfState {
  std::vector<int> heights;
  bool operator==(const IrfState& o) const { return heights == o.heights; }
  bool operator<(const IrfState& o) const { return heights < o.heights; }
  std::string str() const;
};

// Boltzmann weight w(a,b,c,d; z) of the face with corner heights mu + ints;
// exact 0 when the adjacency condition fails. Throws on the height
// degeneracies where the underlying R-entry has a pole.
cplx boltzmann(int a, int b, int c, int d, cplx mu, cplx z, const EllipticParams& ep);

// |LHS - RHS| of the star-triangle equation for boundary labels a..f.
// restricted_N > 0 confines the inner summation to 1..N-1.
double star_triangle_residual(int a, int b, int c, int d, int e, int f, cplx mu,
                              cplx z1, cplx z2, cplx z3, const EllipticParams& ep,
                              int restricted_N = 0);

// all cyclic +-1 paths of even length n with heights in 1..N-1, lexicographic
std::vector<IrfState> restricted_basis(int N, int n);

// independent oracle: closed n-walks on the path graph 1..N-1 via the trace
// of the adjacency power
long walk_count(int N, int n);

using CoeffMap = std::map<IrfState, cplx>;

// one row-to-row transfer step (T v)_{|b>} = sum_a prod_j w(b_{j+1}, a_{j+1},
// a_j, b_j; w - z_j) v_{|a>}; local, reads only paths adjacent to b.
// `positive_only` restricts the sum to positive paths (the T^+ operator).
CoeffMap transfer_apply(const CoeffMap& v, cplx w, std::span<const cplx> z,
                        cplx mu, const EllipticParams& ep,
                        bool positive_only = false, int restricted_N = 0);

// dense restricted transfer matrix over restricted_basis(N, n)
Mat restricted_transfer_matrix(int N, int n, cplx w, std::span<const cplx> z,
                               const EllipticParams& ep, Exec exec = Exec::par);

struct SpectrumResult {
  Vec eigenvalues;
  Mat eigenvectors;          // columns
  Vec eigenvector_residuals;  // ||T v - lambda v|| per column
};
SpectrumResult brute_force_spectrum(const Mat& T);
double commutator_norm(const Mat& A, const Mat& B);

// Restriction of A psi to the admissible delta functions: coefficient at |a>
// is the reduced coefficient of A psi at lambda = 2 eta a_1 on the index M
// with slot weights a_j - a_{j+1} = 1 - 2 m_j.
struct RestrictedVector {
  std::vector<IrfState> basis;
  Vec coeff;
  bool zero = false;  // projection vanished below tolerance
};
RestrictedVector bethe_eigenvector_restricted(const ZeroWeightFn& apsi, int N);

// || T^{N}(w) v - eps v || / ||v|| against the dense restricted matrix
double restricted_eigen_residual(const RestrictedVector& v, cplx eps, int N,
                                 cplx w, std::span<const cplx> z,
                                 const EllipticParams& ep);

// coefficient-wise check of the infinite restricted model inside the height
// window [1, a_max]; requires the neutral coefficients of A psi to vanish.
double infinite_restricted_check(const ZeroWeightFn& apsi, int a_max, cplx w,
                                 cplx eps, double neutral_tol = 1e-7);

// spectrum report JSON per the regression-fixture layout
std::string spectrum_report_json(int N, int n, cplx w, const EllipticParams& ep,
                                 const SpectrumResult& spec, double comm_norm,
                                 std::span<const cplx> bethe_eigenvalues);

// Full desk pipeline: solve the fundamental-case equations, antisymmetrize,
// and keep the first solution (by residual) whose restriction to the
// admissible heights is nonzero. Solutions that project to zero are recorded
// in the trace and skipped.
struct RestrictedPipeline {
  bool ok = false;
  std::string note;
  BetheSolution sol;
  SpacePtr space;
  ZeroWeightFn psi;
  ZeroWeightFn apsi;
  RestrictedVector vec;
};
RestrictedPipeline solve_restricted_bethe(const BetheProblem& pb, int N,
                                          const SolveOptions& opt = {});

}  // namespace elab
