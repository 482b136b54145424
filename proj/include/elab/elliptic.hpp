#pragma once

#include <complex>
#include <stdexcept>

namespace elab {

using cplx = std::complex<double>;

constexpr double kPi = 3.141592653589793238462643383279502884;
inline const cplx kI{0.0, 1.0};

// Global analytic context: modulus tau (Im tau > 0), dynamical step eta,
// qKZB step p (Im p > 0 where used), series/product truncation and the
// default identity-check tolerance.
struct EllipticParams {
  cplx tau;
  cplx eta;
  cplx p{0.0, 0.8};
  int n_terms = 0;     // 0 = derive from tol via |q|^n < tol/10 (min 8)
  double tol = 1e-10;

  cplx q() const { return std::exp(2.0 * kPi * kI * tau); }
  cplx r() const { return std::exp(2.0 * kPi * kI * p); }

  int terms() const;        // effective truncation order
  void validate() const;    // throws std::domain_error on Im tau <= 0
  void validate_p() const;  // additionally requires Im p > 0
};

// Odd Jacobi theta function
//   theta(t) = -sum_j exp(pi*i*(j+1/2)^2 tau + 2*pi*i*(j+1/2)(t+1/2)),
// zeros simple on Z + tau*Z. Terms are summed in symmetric pairs
// (j, -1-j) so oddness holds to roundoff and theta(0) == 0 exactly.
cplx theta(cplx t, const EllipticParams& ep);

// Product formula 2 e^{pi i tau/4} sin(pi t) prod (1-q^j)(1-q^j e^{2pi i t})(1-q^j e^{-2pi i t});
// independent route used by tests and kept as a cross-check oracle.
cplx theta_product(cplx t, const EllipticParams& ep);

// max of |theta(t+1)+theta(t)| and |theta(t+tau)+e^{-2 pi i t - pi i tau} theta(t)|
double theta_quasi_check(cplx t, const EllipticParams& ep);

// theta'(t)/theta(t) from the term-wise differentiated series.
cplx theta_dlog(cplx t, const EllipticParams& ep);

// theta'(t); theta_d0 is the dedicated t=0 branch.
cplx theta_deriv(cplx t, const EllipticParams& ep);
cplx theta_d0(const EllipticParams& ep);

// Elliptic number [k] = theta(2 eta k)/theta(2 eta) and factorial [k]! = [1]...[k].
cplx elliptic_number(int k, const EllipticParams& ep);
cplx elliptic_factorial(int k, const EllipticParams& ep);  // throws for k < 0

// One-variable phase function, truncated double product
//   Omega_a(t) = prod_{j,k>=0} (1-r^j q^k e^{2pi i(t-a)})(1-r^{j+1}q^{k+1}e^{-2pi i(t+a)})
//              / (1-r^j q^k e^{2pi i(t+a)})(1-r^{j+1}q^{k+1}e^{-2pi i(t-a)}).
cplx phase_omega(cplx t, cplx a, const EllipticParams& ep);

// Distance from x to the nearest point of Z + tau*Z (pole/zero avoidance).
double lattice_distance(cplx x, cplx tau);

// Trigonometric (q -> 0) limit 2 e^{pi i tau/4} sin(pi t); used by the Bethe
// continuation seeds and the degeneration tests.
cplx theta_trig(cplx t, const EllipticParams& ep);

}  // namespace elab
