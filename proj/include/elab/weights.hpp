#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "elab/elliptic.hpp"
#include "elab/parallel.hpp"

namespace elab {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Composition M = (m_1,...,m_n) labelling tensor-basis vectors.
struct WeightIndex {
  std::vector<int> parts;

  WeightIndex() = default;
  explicit WeightIndex(std::vector<int> p) : parts(std::move(p)) {}
  WeightIndex(std::initializer_list<int> p) : parts(p) {}

  int n() const { return static_cast<int>(parts.size()); }
  int total() const;
  int operator[](int j) const { return parts[static_cast<size_t>(j)]; }
  bool operator==(const WeightIndex& o) const { return parts == o.parts; }
  bool admissible(std::span<const int> lambdas) const;
  std::string str() const;
};

// Highest weights, evaluation points and the analytic context of one chain.
struct ModelParams {
  std::vector<cplx> lambdas;
  std::vector<cplx> z;
  EllipticParams ell;

  int n() const { return static_cast<int>(lambdas.size()); }
  cplx a(int j) const { return ell.eta * lambdas[static_cast<size_t>(j)]; }
};

// Evaluation point T_M: block j runs z_j - eta*Lambda_j + 2 eta (m_j-1), ..., z_j - eta*Lambda_j.
std::vector<cplx> special_point(const WeightIndex& M, const ModelParams& mp);

// Elliptic weight function omega_M(t_1..t_m, lambda) and its mirror variant.
cplx weight_fn(const WeightIndex& M, std::span<const cplx> t, cplx lambda,
               const ModelParams& mp);
cplx mirror_weight_fn(const WeightIndex& M, std::span<const cplx> t, cplx lambda,
                      const ModelParams& mp);

// Closed forms for the diagonal values omega_M(T_M) / mirror at T_M (n = 2).
// On a vanishing factor the returned `factor` names it; value may be 0 or inf.
struct DiagValue {
  cplx value;
  bool singular = false;
  std::string factor;
};
DiagValue diag_value(const WeightIndex& M, cplx lambda, const ModelParams& mp);
DiagValue diag_value_mirror(const WeightIndex& M, cplx lambda, const ModelParams& mp);

// n = 2 transition matrices A_M^L = omega_M(T_L), At_M^L = mirror omega_M(T_L)
// over Z^2_m ordered by ascending first part; A is lower, At upper triangular.
std::pair<Mat, Mat> basis_matrices(int m, cplx lambda, const ModelParams& mp,
                                   Exec exec = Exec::par);

// |LHS - RHS| of the two-sided resonance identity at
// lambda = r + s tau + 2 eta (Lambda_j - a - b + sum_{l<j}(Lambda_l - 2 m_l)),
// including the exponential prefactors for s != 0. j is 1-based.
double weight_resonance_residual(int j, int a, int b, const WeightIndex& M,
                                 const WeightIndex& L, int r, int s,
                                 std::span<const cplx> t, const ModelParams& mp);

// Twisted S_m action: (s_j f)(t) = f(.., t_{j+1}, t_j, ..) *
// theta(t_j - t_{j+1} - 2 eta)/theta(t_j - t_{j+1} + 2 eta).  j is 0-based here.
cplx sm_twisted_apply(const WeightIndex& M, std::span<const cplx> t, cplx lambda,
                      const ModelParams& mp, int j, bool mirror = false);

}  // namespace elab
