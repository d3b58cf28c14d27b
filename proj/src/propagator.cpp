#include "kincouple/propagator.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kincouple/errors.hpp"
#include "kincouple/specfun.hpp"

namespace kincouple::propagator {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFreeLimit = 1e-8;

void check_time(double T, double hbar) {
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidParameters("propagation time must be positive and finite");
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InvalidParameters("hbar must be positive");
}

double mode_frequency(const NormalModeBasis& basis, int k) {
  const double w2 = basis.omega2(k);
  const double scale = std::max(1.0, basis.omega2.cwiseAbs().maxCoeff());
  if (w2 < -1e-14 * scale) throw InvalidParameters("unstable mode: omega^2 < 0");
  return std::sqrt(std::max(w2, 0.0));
}

void check_caustic(double wT) {
  const double k = std::round(wT / kPi);
  if (k >= 1.0 && std::abs(wT - k * kPi) < 1e-10 * std::max(1.0, wT)) {
    throw CausticError("caustic: omega T = " + std::to_string(static_cast<long>(k)) + " pi");
  }
}

// (x1^2 + x2^2) cos wT - 2 x1 x2 over sin wT, written to avoid cancellation.
double action_ratio_real(double wT, double x1, double x2) {
  const double dx = x2 - x1;
  const double h = std::sin(0.5 * wT);
  return (dx * dx * std::cos(wT) - 4.0 * x1 * x2 * h * h) / std::sin(wT);
}

double action_ratio_imag(double wt, double x1, double x2) {
  const double dx = x2 - x1;
  const double h = std::sinh(0.5 * wt);
  return (dx * dx * std::cosh(wt) + 4.0 * x1 * x2 * h * h) / std::sinh(wt);
}

void check_points(const NormalModeBasis& basis, const Vector& phi1, const Vector& phi2) {
  if (phi1.size() != basis.C.cols() || phi2.size() != basis.C.cols()) {
    throw DimensionMismatch("endpoint dimension does not match the basis");
  }
}

}  // namespace

cplx oscillator_kernel(double omega, double T, double x1, double x2, double hbar, Regime regime) {
  check_time(T, hbar);
  if (!(omega >= 0.0) || !std::isfinite(omega)) throw InvalidParameters("omega must be non-negative");
  const double wT = omega * T;
  const double dx = x2 - x1;
  if (regime == Regime::ImaginaryTime) {
    if (wT > 700.0) throw OverflowError("imaginary-time kernel overflows for omega tau > 700");
    if (wT < kFreeLimit) {
      return std::sqrt(1.0 / (2.0 * kPi * hbar * T)) * std::exp(-dx * dx / (2.0 * hbar * T));
    }
    const double pref = std::sqrt(omega / (2.0 * kPi * hbar * std::sinh(wT)));
    return pref * std::exp(-omega * action_ratio_imag(wT, x1, x2) / (2.0 * hbar));
  }
  if (wT < kFreeLimit) {
    const cplx phase = std::polar(1.0, -kPi / 4.0 + dx * dx / (2.0 * hbar * T));
    return std::sqrt(1.0 / (2.0 * kPi * hbar * T)) * phase;
  }
  check_caustic(wT);
  const double s = std::sin(wT);
  const double maslov = std::floor(wT / kPi);
  const double pref = std::sqrt(omega / (2.0 * kPi * hbar * std::abs(s)));
  const double phase = -kPi / 4.0 - 0.5 * kPi * maslov + omega * action_ratio_real(wT, x1, x2) / (2.0 * hbar);
  return std::polar(pref, phase);
}

KernelValue coupled_kernel(const NormalModeBasis& basis, const Vector& phi1, const Vector& phi2, double T,
                           double hbar, Regime regime) {
  check_points(basis, phi1, phi2);
  const Vector xi1 = modes::to_normal(basis, phi1);
  const Vector xi2 = modes::to_normal(basis, phi2);
  cplx amp = basis.det_C;
  for (int k = 0; k < basis.n(); ++k) {
    amp *= oscillator_kernel(mode_frequency(basis, k), T, xi1(k), xi2(k), hbar, regime);
  }
  KernelValue kv;
  kv.amplitude = amp;
  kv.phi1 = phi1;
  kv.phi2 = phi2;
  kv.T = T;
  kv.regime = regime;
  return kv;
}

double classical_action(const NormalModeBasis& basis, const Vector& phi1, const Vector& phi2, double T) {
  check_points(basis, phi1, phi2);
  check_time(T, 1.0);
  const Vector xi1 = modes::to_normal(basis, phi1);
  const Vector xi2 = modes::to_normal(basis, phi2);
  double S = 0.0;
  for (int k = 0; k < basis.n(); ++k) {
    const double w = mode_frequency(basis, k);
    const double wT = w * T;
    if (wT < kFreeLimit) {
      const double dx = xi2(k) - xi1(k);
      S += dx * dx / (2.0 * T);
    } else {
      check_caustic(wT);
      S += 0.5 * w * action_ratio_real(wT, xi1(k), xi2(k));
    }
  }
  return S;
}

double mvh_determinant(const NormalModeBasis& basis, double T) {
  check_time(T, 1.0);
  double det = basis.det_C * basis.det_C;
  for (int k = 0; k < basis.n(); ++k) {
    const double w = mode_frequency(basis, k);
    const double wT = w * T;
    if (wT < kFreeLimit) {
      det /= T;
    } else {
      check_caustic(wT);
      det *= w / std::sin(wT);
    }
  }
  return det;
}

double energy_level(const NormalModeBasis& basis, const std::vector<int>& n, double hbar) {
  if (static_cast<int>(n.size()) != basis.n()) throw DimensionMismatch("one quantum number per mode is required");
  double E = 0.0;
  for (int k = 0; k < basis.n(); ++k) {
    if (n[k] < 0) throw InvalidParameters("quantum numbers must be non-negative");
    E += hbar * mode_frequency(basis, k) * (n[k] + 0.5);
  }
  return E;
}

double energy_level(const NormalModeBasis& basis, int n1, int n2, double hbar) {
  return energy_level(basis, std::vector<int>{n1, n2}, hbar);
}

double eigenfunction(const NormalModeBasis& basis, const std::vector<int>& n, const Vector& phi, double hbar) {
  if (static_cast<int>(n.size()) != basis.n()) throw DimensionMismatch("one quantum number per mode is required");
  if (phi.size() != basis.C.cols()) throw DimensionMismatch("phi has the wrong dimension");
  if (!(hbar > 0.0)) throw InvalidParameters("hbar must be positive");
  const Vector xi = modes::to_normal(basis, phi);
  double psi = std::sqrt(basis.det_C);
  for (int k = 0; k < basis.n(); ++k) {
    if (n[k] < 0) throw InvalidParameters("quantum numbers must be non-negative");
    if (n[k] > kEigenfunctionMaxQuantum) {
      throw CapExceeded("quantum number " + std::to_string(n[k]) + " exceeds the cap of " +
                        std::to_string(kEigenfunctionMaxQuantum));
    }
    const double w = mode_frequency(basis, k);
    if (!(w > 0.0)) throw InvalidParameters("eigenfunctions need omega > 0 in every mode");
    const double q = std::sqrt(w / hbar);
    psi *= std::sqrt(q) * specfun::hermite_functions(n[k], q * xi(k))[n[k]];
  }
  return psi;
}

double eigenfunction(const NormalModeBasis& basis, int n1, int n2, const Vector& phi, double hbar) {
  return eigenfunction(basis, std::vector<int>{n1, n2}, phi, hbar);
}

cplx spectral_kernel(const NormalModeBasis& basis, const SpectralTruncation& trunc, const Vector& phi1,
                     const Vector& phi2, double T, double hbar) {
  check_points(basis, phi1, phi2);
  check_time(T, hbar);
  if (trunc.n_max < 0) throw InvalidParameters("n_max must be non-negative");
  if (trunc.n_max > specfun::kHermiteMaxDegree) throw CapExceeded("n_max exceeds the Hermite degree cap");
  const Vector xi1 = modes::to_normal(basis, phi1);
  const Vector xi2 = modes::to_normal(basis, phi2);
  cplx total = basis.det_C;
  for (int k = 0; k < basis.n(); ++k) {
    const double w = mode_frequency(basis, k);
    if (!(w > 0.0)) throw InvalidParameters("spectral expansion needs omega > 0 in every mode");
    const double q = std::sqrt(w / hbar);
    const auto h1 = specfun::hermite_functions(trunc.n_max, q * xi1(k));
    const auto h2 = specfun::hermite_functions(trunc.n_max, q * xi2(k));
    cplx sum = 0.0;
    for (int m = 0; m <= trunc.n_max; ++m) {
      const double arg = w * (m + 0.5) * T;
      const cplx phase = trunc.regime == Regime::ImaginaryTime ? cplx(std::exp(-arg), 0.0) : std::polar(1.0, -arg);
      sum += h1[m] * h2[m] * phase;
    }
    total *= q * sum;
  }
  return total;
}

}  // namespace kincouple::propagator
