#pragma once

// Analytic solution of the momentum-coupled two-particle Morse system.
//
// After removing the centre of mass at wavenumber K, the relative coordinate
// obeys  H_rel = -hbar^2 d d^2/dx^2 + lambda (1 - alpha e^{-beta x})^2, i.e. a
// Morse oscillator of effective mass 1/(2d). The centre of mass contributes
// hbar^2 K^2 D/d to every energy.
//
// Conventions used throughout:
//  * Energies called "total" include the centre-of-mass energy; "relative"
//    energies are measured from the bottom of the well (V = 0).
//  * Dissociation threshold E_th = com_energy + lambda.
//  * The confluent-function argument is z(x) = 2 alpha xi e^{-beta x}, which
//    decays towards the dissociation side x -> +inf. (Equivalent to writing
//    the formulas in e^{+beta x} with x -> -x.)
//  * xi = sqrt(lambda/d) / (hbar beta); eta = sqrt((E_th - E)/d) / (hbar beta).

#include <functional>

#include "kincouple/params.hpp"

namespace kincouple::morse {

struct MorseSolution {
  SystemParams params;
  ReducedCoeffs coeffs;
  double xi = 0.0;
  int n_bound = 0;
  double K_com = 0.0;
};

MorseSolution build(const SystemParams& params, double K_com = 0.0);

/// hbar^2 K^2 (1 - mu M kappa^2) / (2 M (1 - 2 mu kappa)) (= hbar^2 K^2 D / d).
double com_energy(const MorseSolution& sol);

/// com_energy + lambda.
double threshold_energy(const MorseSolution& sol);

/// -d hbar^2 beta^2 (n+1/2)^2 + 2 hbar beta (n+1/2) sqrt(lambda d); 0 <= n < n_bound.
double bound_energy_relative(const MorseSolution& sol, int n);

/// com_energy + bound_energy_relative.
double bound_energy(const MorseSolution& sol, int n);

double potential(const SystemParams& params, double x_r);
double potential(const MorseSolution& sol, double x_r);

/// Position of the well minimum, ln(alpha)/beta.
double well_minimum(const SystemParams& params);

/// Relative-coordinate factor of a bound eigenstate, normalised on the line.
class BoundState {
 public:
  BoundState(const MorseSolution& sol, int n);

  double operator()(double x_r) const;
  int index() const { return n_; }
  double energy() const { return energy_; }
  double energy_relative() const { return energy_rel_; }
  /// sqrt(beta (2 xi - 2n - 1) n! (2 alpha xi)^{2 xi - 2n - 1} / Gamma(2 xi - n)).
  /// Throws OverflowError when it exceeds double range; evaluation does not
  /// need it and stays finite.
  double norm_constant() const;

 private:
  int n_;
  double beta_;
  double alpha_xi2_;  // 2 alpha xi
  double s_;          // xi - n - 1/2
  double log_scaled_norm_;
  double norm_;
  double energy_;
  double energy_rel_;
};

BoundState bound_wavefunction(const MorseSolution& sol, int n);

/// Scattering state at Whittaker index k (> 0): relative wavenumber beta k.
///
/// psi_k(x) = sqrt(2 beta / pi) |Gamma(1/2 + i k - xi)| / (2 |Gamma(2 i k)|)
///            z^{-1/2} W_{xi, i k}(z),    z = 2 alpha xi e^{-beta x}.
///
/// W_{xi,ik} is real, so psi_k is real; the constant phase of
/// Gamma(1/2 + ik - xi) is dropped. Far on the dissociation side psi_k tends
/// to sqrt(2 beta / pi) cos(beta k x + phase), i.e. delta(k - k') normalisation.
class ContinuumState {
 public:
  ContinuumState(const MorseSolution& sol, double k);

  double operator()(double x_r) const;
  /// Imaginary part of z^{-1/2} W_{xi,ik}(z) relative to its modulus, as computed.
  double imaginary_residue(double x_r) const;
  double k() const { return k_; }
  /// com_energy + lambda + d hbar^2 beta^2 k^2.
  double energy() const { return energy_; }
  /// Amplitude of the asymptotic plane wave, sqrt(2 beta / pi).
  double asymptotic_amplitude() const;

 private:
  double k_;
  double xi_;
  double beta_;
  double alpha_xi2_;
  double norm_;
  double energy_;
};

ContinuumState continuum_wavefunction(const MorseSolution& sol, double k);

/// Energy Green function G = <x1|(H_rel + com_energy - E)^{-1}|x2> for E below
/// the threshold:
///
///   G = Gamma(1/2 + eta - xi) / (hbar^2 d beta Gamma(1 + 2 eta))
///       (z1 z2)^{-1/2} W_{xi,eta}(z_>) M_{xi,eta}(z_<),
///
/// z_> / z_< being the larger / smaller of z(x1), z(x2). Near a bound level,
/// (E - E_n) G -> -psi_n(x1) psi_n(x2).
/// Throws PoleError within 1e-9 of a pole in 1/2 + eta - xi.
double green_function(const MorseSolution& sol, double E, double x1r, double x2r);

/// 1/G, finite and smooth through the bound-state poles (zero there).
double inverse_green_function(const MorseSolution& sol, double E, double x1r, double x2r);

/// Relative problem handed to the finite-difference oracles.
struct EffectiveRelativeProblem {
  double mass_eff = 0.0;  // 1/(2 d)
  double hbar = 1.0;
  std::function<double(double)> potential;
  double x_lo = 0.0;  // recommended grid bounds
  double x_hi = 0.0;
};

/// Morse potential with the kinetic-coupling effective mass.
EffectiveRelativeProblem relative_problem(const SystemParams& params);

/// Same effective mass, arbitrary potential V(x_r). No analytic solution is
/// claimed; the default bounds are a placeholder the caller should override.
EffectiveRelativeProblem with_custom_potential(const SystemParams& params,
                                               std::function<double(double)> V,
                                               double x_lo = -10.0, double x_hi = 10.0);

}  // namespace kincouple::morse
