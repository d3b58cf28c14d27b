#pragma once

// Special functions used by the analytic Morse and oscillator solutions.
//
// Everything here is pure and reentrant. Complex parameters are taken as
// std::complex<double>; arguments z of the confluent functions are real.

#include <complex>
#include <vector>

namespace kincouple::specfun {

using cplx = std::complex<double>;

/// Principal-branch log Gamma (continuation from the positive real axis, cut
/// along the negative real axis). Throws PoleError at non-positive integers.
cplx log_gamma(cplx z);

/// 1/Gamma(x) for real x; exactly zero at the poles of Gamma.
double rgamma(double x);

/// 1/Gamma(z); zero at non-positive integers.
cplx rgamma(cplx z);

/// Kummer's confluent hypergeometric 1F1(a; b; z) for real z, |z| <= 700.
///
/// Regimes: power series for |z| <= 30, Kummer transformation e^z 1F1(b-a; b; -z)
/// for negative z, and for z > 30 the large-z asymptotic expansion when it
/// converges to double precision (otherwise the series, which is exact in
/// principle but slower).
cplx kummer_m(cplx a, cplx b, double z);

/// Tricomi's U(a; b; z), z > 0.
///
/// Small z uses the two-M linear combination; exactly integer b is reached by
/// averaging b +- 1e-6. Both are accepted only when the cancellation between
/// the two terms leaves at least ~1e-12 (~1e-11 for integer b) relative
/// accuracy. Large z uses the asymptotic series z^-a sum (a)_k (a-b+1)_k / k!
/// (-z)^-k. Everything else, including near-integer b, goes through the
/// Laplace integral evaluated by the trapezoidal rule in log variables and
/// carried to the requested a by the three-term recurrence, run towards
/// decreasing a where U is the minimal solution.
cplx tricomi_u(cplx a, cplx b, double z);

/// Whittaker M_{kap,mu}(z) = e^{-z/2} z^{mu+1/2} 1F1(mu-kap+1/2; 1+2mu; z), z > 0.
double whittaker_m(double kap, double mu, double z);
cplx whittaker_m(double kap, cplx mu, double z);

/// Whittaker W_{kap,mu}(z) = e^{-z/2} z^{mu+1/2} U(mu-kap+1/2; 1+2mu; z), z > 0.
/// For mu = i k the result is real up to rounding (W is even in mu); the
/// complex overload returns the value as computed so callers can check that.
double whittaker_w(double kap, double mu, double z);
cplx whittaker_w(double kap, cplx mu, double z);

/// Associated Laguerre polynomial L_n^{(alpha)}(x), three-term recurrence in n.
double laguerre(int n, double alpha, double x);

constexpr int kHermiteMaxDegree = 512;

/// Physicists' Hermite polynomial H_n(x), n <= kHermiteMaxDegree.
double hermite(int n, double x);

/// Orthonormal Hermite functions h_0..h_nmax at x (unit-frequency oscillator
/// eigenfunctions, integral h_n^2 dx = 1), via the normalised recurrence.
std::vector<double> hermite_functions(int n_max, double x);

}  // namespace kincouple::specfun
