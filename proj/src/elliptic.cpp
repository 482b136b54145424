#include "elab/elliptic.hpp"

#include <algorithm>
#include <cmath>

namespace elab {

int EllipticParams::terms() const {
  if (n_terms > 0) return n_terms;
  const double aq = std::abs(q());
  if (aq >= 1.0) return 64;
  int n = static_cast<int>(std::ceil(std::log(tol / 10.0) / std::log(aq)));
  return std::clamp(n, 8, 256);
}

void EllipticParams::validate() const {
  if (!(tau.imag() > 0.0))
    throw std::domain_error("EllipticParams: Im(tau) must be positive");
  if (!(tol > 0.0)) throw std::domain_error("EllipticParams: tol must be positive");
  if (n_terms > 0 && std::pow(std::abs(q()), n_terms) >= tol)
    throw std::domain_error("EllipticParams: n_terms too small for the tail bound");
}

void EllipticParams::validate_p() const {
  validate();
  if (!(p.imag() > 0.0))
    throw std::domain_error("EllipticParams: Im(p) must be positive");
}

namespace {

// Extra terms so the series still resolves arguments shifted off the real
// axis (e.g. t + tau in the quasi-periodicity checks).
int series_terms(const EllipticParams& ep, double im_t) {
  const int base = ep.terms();
  const int extra = static_cast<int>(std::ceil(std::abs(im_t) / ep.tau.imag())) + 2;
  return std::min(base + extra, 512);
}

}  // namespace

cplx theta(cplx t, const EllipticParams& ep) {
  ep.validate();
  if (t == cplx(0.0, 0.0)) return {0.0, 0.0};
  const int J = series_terms(ep, t.imag());
  // pair j with -1-j; all factors advance by multiplicative recurrences:
  // exp(i pi (j+1/2)^2 tau) = q4 * qq^{j(j+1)},  exp(2 pi i (j+1/2)(t+1/2)) = u2 * u^j
  const cplx q4 = std::exp(kPi * kI * ep.tau * 0.25);
  const cplx grow = std::exp(2.0 * kPi * kI * ep.tau);
  const cplx u = std::exp(2.0 * kPi * kI * (t + 0.5));
  const cplx u2 = std::exp(kPi * kI * (t + 0.5));
  const cplx uinv = 1.0 / u, u2inv = 1.0 / u2;
  cplx qq{1.0, 0.0};    // qq^{j(j+1)}
  cplx step{1.0, 0.0};  // qq^{2j}
  cplx up{1.0, 0.0}, um{1.0, 0.0};
  cplx s{0.0, 0.0};
  for (int j = 0; j < J; ++j) {
    s += q4 * qq * (u2 * up + u2inv * um);
    step *= grow;
    qq *= step;
    up *= u;
    um *= uinv;
  }
  return -s;
}

cplx theta_product(cplx t, const EllipticParams& ep) {
  ep.validate();
  const int J = series_terms(ep, t.imag());
  const cplx q = ep.q();
  const cplx e = std::exp(2.0 * kPi * kI * t);
  cplx prod = 2.0 * std::exp(kPi * kI * ep.tau / 4.0) * std::sin(kPi * t);
  cplx qj{1.0, 0.0};
  for (int j = 1; j <= J; ++j) {
    qj *= q;
    prod *= (1.0 - qj) * (1.0 - qj * e) * (1.0 - qj / e);
  }
  return prod;
}

double theta_quasi_check(cplx t, const EllipticParams& ep) {
  const cplx th = theta(t, ep);
  const double r1 = std::abs(theta(t + 1.0, ep) + th);
  const cplx mult = std::exp(-2.0 * kPi * kI * t - kPi * kI * ep.tau);
  const double r2 = std::abs(theta(t + ep.tau, ep) + mult * th);
  return std::max(r1, r2);
}

cplx theta_deriv(cplx t, const EllipticParams& ep) {
  ep.validate();
  const int J = series_terms(ep, t.imag());
  const cplx q4 = std::exp(kPi * kI * ep.tau * 0.25);
  const cplx grow = std::exp(2.0 * kPi * kI * ep.tau);
  const cplx u = std::exp(2.0 * kPi * kI * (t + 0.5));
  const cplx u2 = std::exp(kPi * kI * (t + 0.5));
  const cplx uinv = 1.0 / u, u2inv = 1.0 / u2;
  cplx qq{1.0, 0.0}, step{1.0, 0.0}, up{1.0, 0.0}, um{1.0, 0.0};
  cplx s{0.0, 0.0};
  for (int j = 0; j < J; ++j) {
    const double a = j + 0.5;
    s += q4 * qq * (2.0 * kPi * kI * a) * (u2 * up - u2inv * um);
    step *= grow;
    qq *= step;
    up *= u;
    um *= uinv;
  }
  return -s;
}

cplx theta_d0(const EllipticParams& ep) {
  ep.validate();
  const int J = ep.terms();
  // at t=0 the paired term reduces to 4 pi a (-1)^j exp(pi i a^2 tau)
  cplx s{0.0, 0.0};
  double sign = 1.0;
  for (int j = 0; j < J; ++j) {
    const double a = j + 0.5;
    s += 4.0 * kPi * a * sign * std::exp(kPi * kI * a * a * ep.tau);
    sign = -sign;
  }
  return s;
}

cplx theta_dlog(cplx t, const EllipticParams& ep) {
  const cplx th = theta(t, ep);
  if (th == cplx(0.0, 0.0))
    throw std::domain_error("theta_dlog: argument at a lattice zero of theta");
  return theta_deriv(t, ep) / th;
}

cplx elliptic_number(int k, const EllipticParams& ep) {
  return theta(2.0 * ep.eta * static_cast<double>(k), ep) / theta(2.0 * ep.eta, ep);
}

cplx elliptic_factorial(int k, const EllipticParams& ep) {
  if (k < 0) throw std::domain_error("elliptic_factorial: negative argument");
  cplx f{1.0, 0.0};
  for (int j = 1; j <= k; ++j) f *= elliptic_number(j, ep);
  return f;
}

cplx phase_omega(cplx t, cplx a, const EllipticParams& ep) {
  ep.validate_p();
  if (a == cplx(0.0, 0.0)) return {1.0, 0.0};
  const cplx q = ep.q(), r = ep.r();
  const cplx ep_ = std::exp(2.0 * kPi * kI * (t - a));
  const cplx em = std::exp(2.0 * kPi * kI * (t + a));
  const int J = series_terms(ep, t.imag()) + series_terms(ep, a.imag());
  cplx prod{1.0, 0.0};
  cplx rj{1.0, 0.0};
  for (int j = 0; j <= J; ++j) {
    cplx rjqk = rj;  // r^j q^k
    for (int k = 0; k <= J; ++k) {
      const cplx next = rjqk * q * r;  // r^{j+1} q^{k+1}
      prod *= (1.0 - rjqk * ep_) * (1.0 - next / em) /
              ((1.0 - rjqk * em) * (1.0 - next / ep_));
      if (std::abs(rjqk) < 1e-20) break;
      rjqk *= q;
    }
    rj *= r;
    if (std::abs(rj) < 1e-20) break;
  }
  return prod;
}

double lattice_distance(cplx x, cplx tau) {
  const double s = std::round(x.imag() / tau.imag());
  double best = 1e300;
  for (double ds = -1; ds <= 1; ++ds) {
    const cplx y = x - (s + ds) * tau;
    const double r = std::round(y.real());
    for (double dr = -1; dr <= 1; ++dr)
      best = std::min(best, std::abs(y - (r + dr)));
  }
  return best;
}

cplx theta_trig(cplx t, const EllipticParams& ep) {
  return 2.0 * std::exp(kPi * kI * ep.tau / 4.0) * std::sin(kPi * t);
}

}  // namespace elab
