#include <doctest.h>

#include <random>

#include "elab/fusion.hpp"

using namespace elab;

TEST_CASE("sl2 triples") {
  CHECK(fusion_triple_sl2(1, 1, 2));
  CHECK(!fusion_triple_sl2(1, 1, 1));  // parity
  CHECK(fusion_triple_sl2(1, 1, 0));
  CHECK(!fusion_triple_sl2(0, 0, 1));
  CHECK(!fusion_triple_sl2(-1, 1, 0));
  // permutation symmetry on random triples
  std::mt19937_64 rng(5);
  for (int d = 0; d < 200; ++d) {
    const int a = static_cast<int>(rng() % 5), b = static_cast<int>(rng() % 5),
              c = static_cast<int>(rng() % 5);
    const bool base = fusion_triple_sl2(a, b, c);
    CHECK(fusion_triple_sl2(b, a, c) == base);
    CHECK(fusion_triple_sl2(c, b, a) == base);
    CHECK(fusion_triple_sl2(a, c, b) == base);
  }
}

TEST_CASE("path admissibility and shift stability") {
  const std::vector<int> lam{1, 1, 1, 1};
  CHECK(fusion_path(std::vector<int>{1, 2, 1, 2}, lam));
  CHECK(fusion_path(std::vector<int>{0, 1, 0, 1}, lam));   // isolated zeros allowed
  CHECK(!fusion_path(std::vector<int>{0, 0, 1, 1}, lam));  // adjacent zeros fail
  // shifting an admissible path up stays admissible
  std::mt19937_64 rng(7);
  for (int d = 0; d < 200; ++d) {
    std::vector<int> a(4);
    for (auto& x : a) x = static_cast<int>(rng() % 4);
    if (fusion_path(a, lam)) {
      std::vector<int> b = a;
      for (auto& x : b) ++x;
      CHECK(fusion_path(b, lam));
    }
  }
  // all weights equal: ordinary and modified rules coincide
  for (int d = 0; d < 200; ++d) {
    std::vector<int> a(4);
    for (auto& x : a) x = static_cast<int>(rng() % 4);
    CHECK(fusion_path(a, lam) == modified_fusion_path(a, lam));
  }
  // a constant path fails when some weight exceeds twice the height
  const std::vector<int> lam2{1, 3, 1, 1};
  CHECK(!fusion_path(std::vector<int>{1, 1, 1, 1}, lam2));
}

TEST_CASE("modified rules differ for unequal weights") {
  const std::vector<int> lam{2, 1, 1};
  // triple order differs: find a path distinguishing the two conventions
  bool differ = false;
  for (int a1 = 0; a1 <= 3 && !differ; ++a1)
    for (int a2 = 0; a2 <= 3 && !differ; ++a2)
      for (int a3 = 0; a3 <= 3 && !differ; ++a3) {
        const std::vector<int> a{a1, a2, a3};
        if (fusion_path(a, lam) != modified_fusion_path(a, lam)) differ = true;
      }
  CHECK(differ);
}

TEST_CASE("shift numbers against the brute-force scan") {
  std::mt19937_64 rng(11);
  SUBCASE("stated example") {
    CHECK(shift_number(std::vector<int>{1, -1}, std::vector<int>{1, 1}) == 0);
  }
  SUBCASE("500 random instances") {
    for (int d = 0; d < 500; ++d) {
      const int n = 2 + static_cast<int>(rng() % 3);
      std::vector<int> lam(static_cast<size_t>(n));
      for (auto& l : lam) l = 1 + static_cast<int>(rng() % 3);
      // random weight vector with zero sum
      std::vector<int> w(static_cast<size_t>(n));
      int tries = 0;
      for (;;) {
        int sum = 0;
        for (int j = 0; j < n; ++j) {
          const int options = lam[static_cast<size_t>(j)] + 1;
          w[static_cast<size_t>(j)] =
              -lam[static_cast<size_t>(j)] + 2 * static_cast<int>(rng() % options);
          sum += w[static_cast<size_t>(j)];
        }
        if (sum == 0) break;
        if (++tries > 500) break;
      }
      int sum = 0;
      for (int x : w) sum += x;
      if (sum != 0) continue;
      const int fast = shift_number(w, lam);
      int brute = -1;
      for (int k = 0; k <= 30 && brute < 0; ++k) {
        std::vector<int> path(static_cast<size_t>(n));
        int acc = 0;
        for (int j = 0; j < n; ++j) {
          acc += w[static_cast<size_t>(j)];
          path[static_cast<size_t>(j)] = acc + k;
        }
        if (fusion_path(path, lam)) brute = k;
      }
      CHECK(fast == brute);
      // the dual vector's shift number also matches the scan
      std::vector<int> mw(w.size());
      for (size_t i = 0; i < w.size(); ++i) mw[i] = -w[i];
      int brute_m = -1;
      for (int k = 0; k <= 30 && brute_m < 0; ++k) {
        std::vector<int> path(static_cast<size_t>(n));
        int acc = 0;
        for (int j = 0; j < n; ++j) {
          acc += mw[static_cast<size_t>(j)];
          path[static_cast<size_t>(j)] = acc + k;
        }
        if (fusion_path(path, lam)) brute_m = k;
      }
      CHECK(shift_number(mw, lam) == brute_m);
      // the window [-k(w), k(-w)] always contains 0
      CHECK(shift_number(w, lam) >= 0);
      CHECK(shift_number(mw, lam) >= 0);
    }
  }
}

TEST_CASE("root-of-unity triples") {
  // large N reduces to the sl2 rule on bounded triples
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; b <= 3; ++b)
      for (int c = 0; c <= 3; ++c)
        CHECK(fusion_triple_uq(a, b, c, 50) == fusion_triple_sl2(a, b, c));
  // boundary case a + b + c = 2N - 4
  const int N = 5;
  CHECK(fusion_triple_uq(N - 2, N - 2, 0, N));
  CHECK(!fusion_triple_uq(N - 2, N - 2, 2, N));
  CHECK_THROWS_AS(fusion_triple_uq(0, 0, 0, 1), std::invalid_argument);
}

TEST_CASE("vanishing support") {
  const std::vector<int> lam{1, 1, 1, 1};
  const WeightIndex M{{1, 1, 0, 0}};
  SUBCASE("k = 0 is always forced") {
    for (auto kind : {FusionKind::ordinary, FusionKind::modified})
      CHECK(vanishing_support(M, lam, kind, 0));
  }
  SUBCASE("outside the window nothing is forced") {
    const auto w = index_weight_vector(M, lam);
    std::vector<int> mw(w.size());
    for (size_t i = 0; i < w.size(); ++i) mw[i] = -w[i];
    const int kmw = shift_number(mw, lam);
    CHECK(!vanishing_support(M, lam, FusionKind::ordinary, kmw + 1));
    CHECK(vanishing_support(M, lam, FusionKind::ordinary, kmw));
  }
  SUBCASE("interior of the window is forced") {
    const auto w = index_weight_vector(M, lam);
    std::vector<int> mw(w.size());
    for (size_t i = 0; i < w.size(); ++i) mw[i] = -w[i];
    for (int k = -shift_number(w, lam); k <= shift_number(mw, lam); ++k)
      CHECK(vanishing_support(M, lam, FusionKind::ordinary, k));
  }
  SUBCASE("N-periodic variant") {
    // eta = 1/8 heights: forced exactly off the open interval (k(-w), N-k(w))
    const int N = 4;
    const auto w = index_weight_vector(M, lam);
    std::vector<int> mw(w.size());
    for (size_t i = 0; i < w.size(); ++i) mw[i] = -w[i];
    const int kw = shift_number(w, lam), kmw = shift_number(mw, lam);
    for (int k = 0; k < N; ++k) {
      const bool inside = kmw < k && k < N - kw;
      CHECK(vanishing_support(M, lam, FusionKind::ordinary, k, N) == !inside);
    }
    // periodicity
    for (int k = -N; k < 2 * N; ++k)
      CHECK(vanishing_support(M, lam, FusionKind::ordinary, k, N) ==
            vanishing_support(M, lam, FusionKind::ordinary, k + N, N));
  }
}
