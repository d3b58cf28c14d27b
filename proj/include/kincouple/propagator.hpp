#pragma once

// Exact propagators of quadratic systems, built mode by mode from a
// NormalModeBasis (unit normal masses).
//
// Imaginary-time kernels are exp(-tau H / hbar) in the position basis; the
// argument T is then tau.

#include <complex>
#include <vector>

#include "kincouple/normal_modes.hpp"

namespace kincouple::propagator {

using cplx = std::complex<double>;
using modes::NormalModeBasis;
using modes::Vector;

enum class Regime { RealTime, ImaginaryTime };

/// Single unit-mass oscillator kernel K(x2, x1; T). Real time carries the
/// Maslov factor e^{-i pi floor(omega T / pi) / 2}; omega T below 1e-8 uses the
/// free-particle kernel. Throws CausticError at omega T = k pi (real time) and
/// OverflowError for omega tau > 700 (imaginary time).
cplx oscillator_kernel(double omega, double T, double x1, double x2, double hbar, Regime regime);

struct KernelValue {
  cplx amplitude;
  Vector phi1;  // start point
  Vector phi2;  // end point
  double T = 0.0;
  Regime regime = Regime::ImaginaryTime;
};

/// |det C| prod_k oscillator_kernel(omega_k, T, (C phi1)_k, (C phi2)_k).
KernelValue coupled_kernel(const NormalModeBasis& basis, const Vector& phi1, const Vector& phi2, double T,
                           double hbar, Regime regime);

/// Real-time classical action between phi1 and phi2 in time T.
double classical_action(const NormalModeBasis& basis, const Vector& phi1, const Vector& phi2, double T);

/// det(-d^2 S / d phi2 d phi1) = det(C)^2 prod_k omega_k / sin(omega_k T).
double mvh_determinant(const NormalModeBasis& basis, double T);

/// sum_k hbar omega_k (n_k + 1/2).
double energy_level(const NormalModeBasis& basis, const std::vector<int>& n, double hbar);
double energy_level(const NormalModeBasis& basis, int n1, int n2, double hbar);

constexpr int kEigenfunctionMaxQuantum = 60;

/// |det C|^{1/2} prod_k (omega_k/hbar)^{1/4} h_{n_k}(sqrt(omega_k/hbar) xi_k), normalised in phi.
double eigenfunction(const NormalModeBasis& basis, const std::vector<int>& n, const Vector& phi, double hbar);
double eigenfunction(const NormalModeBasis& basis, int n1, int n2, const Vector& phi, double hbar);

struct SpectralTruncation {
  int n_max = 0;  // per-mode cutoff
  Regime regime = Regime::ImaginaryTime;
};

/// Eigenfunction expansion with every n_k <= n_max and phases
/// e^{-i omega_k (n_k + 1/2) T} (real time) or e^{-omega_k (n_k + 1/2) tau}.
cplx spectral_kernel(const NormalModeBasis& basis, const SpectralTruncation& trunc, const Vector& phi1,
                     const Vector& phi2, double T, double hbar);

}  // namespace kincouple::propagator
