#include <doctest.h>

#include "elab/irf.hpp"
#include "elab/sampling.hpp"

using namespace elab;

// every parallel kernel has a serial twin; outputs must agree bitwise since
// the work items are independent and no reductions are involved

TEST_CASE("transition matrices: serial vs parallel") {
  EllipticParams ep;
  ep.tau = {0.2, 0.8};
  ep.eta = {0.1137, 0.0391};
  ModelParams mp{{cplx{1.31, 0.12}, cplx{1.72, -0.08}},
                 {cplx{0.05, 0.0}, cplx{0.41, 0.0}},
                 ep};
  for (int m = 1; m <= 4; ++m) {
    const auto [As, Ts] = basis_matrices(m, {0.19, 0.07}, mp, Exec::serial);
    const auto [Ap, Tp] = basis_matrices(m, {0.19, 0.07}, mp, Exec::par);
    CHECK((As - Ap).cwiseAbs().maxCoeff() == 0.0);
    CHECK((Ts - Tp).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("restricted transfer build: serial vs parallel") {
  EllipticParams ep;
  ep.tau = {0.1, 1.0};
  ep.eta = {0.125, 0.0};
  const std::vector<cplx> z{{0.04, 0.0}, {0.23, 0.0}, {0.47, 0.0}, {0.68, 0.0}};
  const Mat a = restricted_transfer_matrix(4, 4, {0.31, 0.21}, z, ep, Exec::serial);
  const Mat b = restricted_transfer_matrix(4, 4, {0.31, 0.21}, z, ep, Exec::par);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("parallel_for covers every index exactly once") {
  std::vector<int> hits(1000, 0);
  parallel_for(1000, [&](std::ptrdiff_t i) { hits[static_cast<size_t>(i)] += 1; });
  for (int h : hits) CHECK(h == 1);
  parallel_for(0, [&](std::ptrdiff_t) { CHECK(false); });
}
