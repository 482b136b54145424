#include <doctest.h>

#include "elab/elliptic.hpp"
#include "elab/sampling.hpp"

using namespace elab;

namespace {

EllipticParams params(cplx tau = {0.2, 0.8}) {
  EllipticParams ep;
  ep.tau = tau;
  ep.eta = {0.1137, 0.0391};
  ep.p = {0.13, 0.79};
  return ep;
}

}  // namespace

TEST_CASE("theta vanishes on the lattice and is odd") {
  const EllipticParams ep = params({0.0, 1.0});
  CHECK(std::abs(theta(0.0, ep)) == 0.0);
  CHECK(std::abs(theta(1.0, ep)) < 1e-12);
  CHECK(std::abs(theta(ep.tau, ep)) < 1e-12);
  Sampler smp(3);
  for (int i = 0; i < 50; ++i) {
    const cplx t = smp.box(-1, 1, -0.3, 0.3);
    CHECK(std::abs(theta(-t, ep) + theta(t, ep)) < 1e-12);
  }
}

TEST_CASE("theta at 1/2 matches the closed product value") {
  // product formula evaluated directly at t = 1/2, tau = i
  const EllipticParams ep = params({0.0, 1.0});
  const double q = std::exp(-2.0 * kPi);
  double prod = 1.0;
  for (int j = 1; j < 60; ++j) {
    const double qj = std::pow(q, j);
    prod *= (1.0 - qj) * (1.0 + qj) * (1.0 + qj);
  }
  const double expected = 2.0 * std::exp(-kPi / 4.0) * prod;
  CHECK(std::abs(theta(0.5, ep) - expected) < 1e-13);
}

TEST_CASE("sum and product formulas agree off the real axis") {
  Sampler smp(5);
  for (cplx tau : {cplx{0.0, 1.0}, cplx{0.2, 0.8}, cplx{-0.13, 0.62}}) {
    const EllipticParams ep = params(tau);
    for (int i = 0; i < 40; ++i) {
      const cplx t = smp.box(-1.2, 1.2, -0.35, 0.35);
      CHECK(std::abs(theta(t, ep) - theta_product(t, ep)) < 1e-11);
    }
  }
}

TEST_CASE("quasi-periodicity multipliers") {
  const EllipticParams ep = params();
  Sampler smp(7);
  CHECK(theta_quasi_check(0.0, ep) < 1e-12);
  CHECK(theta_quasi_check({0.3, 0.1}, ep) < 1e-11);
  for (int i = 0; i < 30; ++i)
    CHECK(theta_quasi_check(smp.box(-1, 1, -0.2, 0.2), ep) < 1e-11);
}

TEST_CASE("rejects non-convergent parameters") {
  EllipticParams ep = params();
  ep.tau = {0.3, -0.2};
  CHECK_THROWS_AS(theta(0.1, ep), std::domain_error);
  ep.tau = {0.3, 0.0};
  CHECK_THROWS_AS(theta(0.1, ep), std::domain_error);
}

TEST_CASE("log derivative: oddness, finite differences, derivative at zero") {
  const EllipticParams ep = params();
  Sampler smp(11);
  for (int i = 0; i < 20; ++i) {
    const cplx t = smp.generic(ep.tau, 0.1, [](cplx x) { return std::vector<cplx>{x}; });
    CHECK(std::abs(theta_dlog(-t, ep) + theta_dlog(t, ep)) < 1e-9);
    const double h = 1e-6;
    const cplx fd = (theta(t + h, ep) - theta(t - h, ep)) / (2.0 * h);
    CHECK(std::abs(theta_dlog(t, ep) - fd / theta(t, ep)) < 1e-6);
  }
  // theta'(0) against the differentiated product formula
  const cplx q = ep.q();
  cplx prod{1.0, 0.0};
  for (int j = 1; j < 80; ++j) prod *= std::pow(1.0 - std::pow(q, j), 3);
  const cplx expected = 2.0 * kPi * std::exp(kPi * kI * ep.tau / 4.0) * prod;
  CHECK(std::abs(theta_d0(ep) - expected) < 1e-11);
  CHECK_THROWS_AS(theta_dlog(0.0, ep), std::domain_error);
}

TEST_CASE("elliptic numbers and factorials") {
  const EllipticParams ep = params();
  CHECK(std::abs(elliptic_number(1, ep) - 1.0) < 1e-14);
  CHECK(std::abs(elliptic_number(0, ep)) == 0.0);
  CHECK(std::abs(elliptic_factorial(0, ep) - 1.0) == 0.0);
  CHECK_THROWS_AS(elliptic_factorial(-1, ep), std::domain_error);
  Sampler smp(13);
  for (int k = 1; k <= 5; ++k)
    CHECK(std::abs(elliptic_number(-k, ep) + elliptic_number(k, ep)) < 1e-12);
  (void)smp;
}

TEST_CASE("phase function identities") {
  const EllipticParams ep = params();
  CHECK(std::abs(phase_omega({0.3, 0.1}, 0.0, ep) - 1.0) == 0.0);
  Sampler smp(17);
  for (int i = 0; i < 8; ++i) {
    const cplx zv = smp.box(-0.4, 0.4, -0.05, 0.2);
    const cplx a = smp.box(0.05, 0.3, 0.0, 0.15);
    // shift identity Omega_a(z + p) = e^{2 pi i a} theta(z+a)/theta(z-a) Omega_a(z)
    const cplx lhs = phase_omega(zv + ep.p, a, ep);
    const cplx rhs = std::exp(2.0 * kPi * kI * a) * theta(zv + a, ep) /
                     theta(zv - a, ep) * phase_omega(zv, a, ep);
    CHECK(std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)) < 1e-10);
    // tau <-> p symmetry
    EllipticParams swapped = ep;
    std::swap(swapped.tau, swapped.p);
    CHECK(std::abs(phase_omega(zv, a, ep) - phase_omega(zv, a, swapped)) < 1e-10);
    // 1-periodicity
    CHECK(std::abs(phase_omega(zv + 1.0, a, ep) - phase_omega(zv, a, ep)) < 1e-10);
  }
}

TEST_CASE("phase function degenerates visibly at product poles") {
  const EllipticParams ep = params();
  const cplx a{0.17, 0.05};
  CHECK(!std::isfinite(std::abs(phase_omega(-a, a, ep))));  // denominator zero
  CHECK(std::abs(phase_omega(a, a, ep)) == 0.0);            // numerator zero
}

TEST_CASE("trigonometric limit of theta") {
  EllipticParams ep = params({0.1, 4.0});
  Sampler smp(19);
  for (int i = 0; i < 10; ++i) {
    const cplx t = smp.box(-0.5, 0.5, -0.1, 0.1);
    CHECK(std::abs(theta(t, ep) - theta_trig(t, ep)) < 1e-9);
  }
}
