#pragma once

#include <functional>
#include <memory>

#include "elab/rmatrix.hpp"
#include "elab/weights.hpp"

namespace elab {

// All compositions of m into n non-negative parts, lexicographic.
std::vector<WeightIndex> compositions(int m, int n);

// Tensor chain V_{L1} x ... x V_{Ln} at evaluation points z; `finite` selects
// the integer-weight quotients (R-blocks built by the fusion recursion).
struct Chain {
  std::vector<cplx> lambdas;
  std::vector<cplx> z;
  EllipticParams ell;
  bool finite = false;
  std::vector<int> int_lambdas;

  int n() const { return static_cast<int>(lambdas.size()); }
  int cap(int slot) const;  // max occupation of a slot (INT_MAX-ish for Verma)
  // level block of R_{L_a, L_b}(zspec, lam); indices ascending first part
  Mat pair_block(int a, int b, cplx zspec, cplx lam, int level) const;
  int pair_base(int a, int b, int level) const;  // first index of that block

  static Chain verma(std::vector<cplx> lambdas, std::vector<cplx> z, EllipticParams ep);
  static Chain quotient(std::vector<int> lambdas, std::vector<cplx> z, EllipticParams ep);
};

// Weight-preserving subspace of the chain spanned by indices of total m
// (admissible ones in the finite case); m = half the total weight for the
// zero-weight space, but other levels are used by the transfer matrices.
struct LevelSpace {
  Chain chain;
  int m = 0;
  std::vector<WeightIndex> basis;

  int dim() const { return static_cast<int>(basis.size()); }
  int find(const WeightIndex& M) const;
  static std::shared_ptr<const LevelSpace> make(Chain chain, int m);
};

using SpacePtr = std::shared_ptr<const LevelSpace>;

enum class BasisKind { standard, reduced };

// Function of lambda with values in a level space (usually the zero-weight
// space); operators below consume and produce these lazily.
struct ZeroWeightFn {
  SpacePtr space;
  std::function<Vec(cplx)> eval;
  BasisKind kind = BasisKind::standard;

  Vec operator()(cplx lambda) const { return eval(lambda); }
};

// basis conversion: reduced coefficients W_J = [j_1]!...[j_n]! w_J
ZeroWeightFn to_reduced(const ZeroWeightFn& f);
ZeroWeightFn to_standard(const ZeroWeightFn& f);

// seeded trigonometric-polynomial test functions (entire in lambda)
ZeroWeightFn random_test_fn(const SpacePtr& space, uint64_t seed, int degree = 2);

ZeroWeightFn operator+(const ZeroWeightFn& f, const ZeroWeightFn& g);
ZeroWeightFn operator-(const ZeroWeightFn& f, const ZeroWeightFn& g);
ZeroWeightFn scale(const ZeroWeightFn& f, cplx c);

}  // namespace elab
