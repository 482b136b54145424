#pragma once

#include <span>
#include <vector>

#include "elab/weights.hpp"

namespace elab {

// sl2 fusion rule: L_c occurs in L_a (x) L_b.
bool fusion_triple_sl2(int a, int b, int c);

// cyclic path admissibility: ordinary uses triples (a_{j-1}, a_j, L_j) with
// a_0 = a_n; modified uses (a_j, a_{j+1}, L_j) with a_{n+1} = a_1.
bool fusion_path(std::span<const int> a, std::span<const int> lambdas);
bool modified_fusion_path(std::span<const int> a, std::span<const int> lambdas);

// minimal k >= 0 such that (S^1 + k, ..., S^n + k) is admissible, S^j the
// prefix sums of the weight vector w.
int shift_number(std::span<const int> w, std::span<const int> lambdas);

// U_q(sl2) fusion rules at q = e^{2 pi i / N}.
bool fusion_triple_uq(int a, int b, int c, int N);
bool uq_fusion_path(std::span<const int> a, std::span<const int> lambdas, int N);
bool uq_modified_fusion_path(std::span<const int> a, std::span<const int> lambdas, int N);

enum class FusionKind { ordinary, modified };

// Whether the coefficient of a Weyl anti-symmetric eigenfunction at
// lambda = 2 eta k (signed k) is forced to vanish: true iff the shifted path
// fails the (modified) fusion rules; N > 0 switches to the U_q rules with the
// N-periodic normalization of k.
bool vanishing_support(const WeightIndex& M, std::span<const int> lambdas,
                       FusionKind kind, int k, int N = 0);

// weight vector of a basis index: w_j = Lambda_j - 2 m_j
std::vector<int> index_weight_vector(const WeightIndex& M, std::span<const int> lambdas);

}  // namespace elab
