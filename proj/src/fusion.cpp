#include "elab/fusion.hpp"

#include <stdexcept>

namespace elab {

bool fusion_triple_sl2(int a, int b, int c) {
  if (a < 0 || b < 0 || c < 0) return false;
  if ((a - b + c) % 2 != 0) return false;
  return std::abs(a - b) <= c && c <= a + b;
}

bool fusion_path(std::span<const int> a, std::span<const int> lambdas) {
  const size_t n = a.size();
  for (size_t j = 0; j < n; ++j) {
    const int prev = a[(j + n - 1) % n];
    if (!fusion_triple_sl2(prev, a[j], lambdas[j])) return false;
  }
  return true;
}

bool modified_fusion_path(std::span<const int> a, std::span<const int> lambdas) {
  const size_t n = a.size();
  for (size_t j = 0; j < n; ++j) {
    const int next = a[(j + 1) % n];
    if (!fusion_triple_sl2(a[j], next, lambdas[j])) return false;
  }
  return true;
}

int shift_number(std::span<const int> w, std::span<const int> lambdas) {
  const size_t n = w.size();
  std::vector<int> sig(n);
  int acc = 0;
  for (size_t j = 0; j < n; ++j) {
    acc += w[j];
    sig[j] = acc;
  }
  if (acc != 0) throw std::invalid_argument("shift_number: weights must sum to 0");
  // k must clear non-negativity and every triple constraint
  // Lambda_j <= (S^{j-1}+k) + (S^j+k); the parity/range parts hold for any k.
  int k = 0;
  for (size_t j = 0; j < n; ++j) {
    k = std::max(k, -sig[j]);
    const int prev = sig[(j + n - 1) % n];
    const int need = lambdas[j] - prev - sig[j];  // 2k >= need
    k = std::max(k, (need + 1) / 2);
  }
  return k;
}

bool fusion_triple_uq(int a, int b, int c, int N) {
  if (N < 2) throw std::invalid_argument("fusion_triple_uq: N >= 2 required");
  if (!fusion_triple_sl2(a, b, c)) return false;
  if (a > N - 2 || b > N - 2 || c > N - 2) return false;
  return a + b + c <= 2 * N - 4;
}

bool uq_fusion_path(std::span<const int> a, std::span<const int> lambdas, int N) {
  const size_t n = a.size();
  for (size_t j = 0; j < n; ++j) {
    const int prev = a[(j + n - 1) % n];
    if (!fusion_triple_uq(prev, a[j], lambdas[j], N)) return false;
  }
  return true;
}

bool uq_modified_fusion_path(std::span<const int> a, std::span<const int> lambdas, int N) {
  const size_t n = a.size();
  for (size_t j = 0; j < n; ++j) {
    const int next = a[(j + 1) % n];
    if (!fusion_triple_uq(a[j], next, lambdas[j], N)) return false;
  }
  return true;
}

std::vector<int> index_weight_vector(const WeightIndex& M, std::span<const int> lambdas) {
  std::vector<int> w(static_cast<size_t>(M.n()));
  for (int j = 0; j < M.n(); ++j) w[static_cast<size_t>(j)] = lambdas[static_cast<size_t>(j)] - 2 * M[j];
  return w;
}

bool vanishing_support(const WeightIndex& M, std::span<const int> lambdas,
                       FusionKind kind, int k, int N) {
  const size_t n = static_cast<size_t>(M.n());
  const std::vector<int> w = index_weight_vector(M, lambdas);
  std::vector<int> sums(n);
  if (kind == FusionKind::ordinary) {
    int acc = 0;
    for (size_t j = 0; j < n; ++j) {
      acc += w[j];
      sums[j] = acc;
    }
  } else {
    int acc = 0;
    for (size_t j = n; j-- > 0;) {
      acc += w[j];
      sums[j] = acc;
    }
  }
  auto path_ok = [&](int kk) {
    // coefficient at lambda = 2 eta kk; the guarding path is
    // (-sums + kk - 1) for kk >= 0 and (sums + |kk| - 1) for kk < 0
    std::vector<int> path(n);
    const int sgn = kk >= 0 ? -1 : 1;
    const int kabs = std::abs(kk);
    for (size_t j = 0; j < n; ++j) path[j] = sgn * sums[j] + kabs - 1;
    if (N > 0)
      return kind == FusionKind::ordinary ? uq_fusion_path(path, lambdas, N)
                                          : uq_modified_fusion_path(path, lambdas, N);
    return kind == FusionKind::ordinary ? fusion_path(path, lambdas)
                                        : modified_fusion_path(path, lambdas);
  };
  if (N > 0) {
    // relations are N-periodic in k at eta = 1/2N, e^{2c} = 1
    int kk = ((k % N) + N) % N;
    return !path_ok(kk);
  }
  return !path_ok(k);
}

}  // namespace elab
