#include "kincouple/morse.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "kincouple/errors.hpp"
#include "kincouple/specfun.hpp"

namespace kincouple::morse {

namespace {

using specfun::cplx;

void require_well(const MorseSolution& sol, const char* who) {
  if (!(sol.params.lambda > 0.0)) {
    throw InvalidParameters(std::string(who) + ": lambda > 0 is required");
  }
}

void require_bound_index(const MorseSolution& sol, int n) {
  if (n < 0 || n >= sol.n_bound) {
    throw IndexOutOfRange("bound state index " + std::to_string(n) + " outside [0, " +
                          std::to_string(sol.n_bound) + ")");
  }
}

double log_z(const MorseSolution& sol, double x) {
  return std::log(2.0 * sol.params.alpha * sol.xi) - sol.params.beta * x;
}

// Sign of Gamma(x) for real x that is not a pole.
double gamma_sign(double x) {
  if (x > 0.0) return 1.0;
  return std::fmod(std::floor(x), 2.0) == 0.0 ? 1.0 : -1.0;
}

struct GreenPieces {
  double eta;
  double a;        // 1/2 + eta - xi
  double z_large;
  double z_small;
  double log_sqrt_zz;  // log sqrt(z1 z2)
};

GreenPieces green_pieces(const MorseSolution& sol, double E, double x1, double x2) {
  require_well(sol, "green_function");
  const auto& p = sol.params;
  const double gap = threshold_energy(sol) - E;
  if (!(gap > 0.0)) throw InvalidParameters("green_function: E must lie below the dissociation threshold");
  GreenPieces g;
  g.eta = std::sqrt(gap / sol.coeffs.d) / (p.hbar * p.beta);
  g.a = 0.5 + g.eta - sol.xi;
  const double l1 = log_z(sol, x1);
  const double l2 = log_z(sol, x2);
  g.z_large = std::exp(std::max(l1, l2));
  g.z_small = std::exp(std::min(l1, l2));
  g.log_sqrt_zz = 0.5 * (l1 + l2);
  return g;
}

}  // namespace

MorseSolution build(const SystemParams& params, double K_com) {
  MorseSolution sol;
  sol.params = params;
  sol.coeffs = reduce(params);
  if (!std::isfinite(K_com)) throw InvalidParameters("invalid parameters: K_com must be finite");
  sol.K_com = K_com;
  sol.xi = std::sqrt(params.lambda / sol.coeffs.d) / (params.hbar * params.beta);
  sol.n_bound = sol.xi > 0.5 ? static_cast<int>(std::ceil(sol.xi - 0.5)) : 0;
  return sol;
}

double com_energy(const MorseSolution& sol) {
  const auto& p = sol.params;
  const double M = sol.coeffs.M_total;
  const double muM = p.m1 * p.m2;
  const double hk = p.hbar * sol.K_com;
  return hk * hk * (1.0 - muM * p.kappa * p.kappa) / (2.0 * M * (1.0 - 2.0 * sol.coeffs.mu * p.kappa));
}

double threshold_energy(const MorseSolution& sol) { return com_energy(sol) + sol.params.lambda; }

double bound_energy_relative(const MorseSolution& sol, int n) {
  require_bound_index(sol, n);
  const auto& p = sol.params;
  const double d = sol.coeffs.d;
  const double nu = n + 0.5;
  const double hb = p.hbar * p.beta;
  return -d * hb * hb * nu * nu + 2.0 * hb * nu * std::sqrt(p.lambda * d);
}

double bound_energy(const MorseSolution& sol, int n) {
  return com_energy(sol) + bound_energy_relative(sol, n);
}

double potential(const SystemParams& params, double x_r) {
  const double s = 1.0 - params.alpha * std::exp(-params.beta * x_r);
  return params.lambda * s * s;
}

double potential(const MorseSolution& sol, double x_r) { return potential(sol.params, x_r); }

double well_minimum(const SystemParams& params) { return std::log(params.alpha) / params.beta; }

BoundState::BoundState(const MorseSolution& sol, int n) : n_(n) {
  require_bound_index(sol, n);
  require_well(sol, "bound_wavefunction");
  beta_ = sol.params.beta;
  alpha_xi2_ = 2.0 * sol.params.alpha * sol.xi;
  s_ = sol.xi - n - 0.5;
  // psi = N (2 alpha xi)^{-s} z^s e^{-z/2} L_n^{(2s)}(z); the scaled prefactor
  // stays finite even when N itself would overflow.
  log_scaled_norm_ =
      0.5 * (std::log(2.0 * s_ * beta_) + std::lgamma(n + 1.0) - std::lgamma(2.0 * sol.xi - n));
  norm_ = std::exp(log_scaled_norm_ + s_ * std::log(alpha_xi2_));
  energy_rel_ = bound_energy_relative(sol, n);
  energy_ = com_energy(sol) + energy_rel_;
  if (!std::isfinite(log_scaled_norm_)) throw OverflowError("bound_wavefunction: normalisation overflows");
}

double BoundState::operator()(double x_r) const {
  const double lz = std::log(alpha_xi2_) - beta_ * x_r;
  if (lz > 700.0) return 0.0;  // deep inside the repulsive wall
  const double z = std::exp(lz);
  const double lag = specfun::laguerre(n_, 2.0 * s_, z);
  if (lag == 0.0) return 0.0;
  const double mag = std::exp(log_scaled_norm_ + s_ * lz - 0.5 * z + std::log(std::abs(lag)));
  return lag > 0.0 ? mag : -mag;
}

double BoundState::norm_constant() const {
  if (!std::isfinite(norm_)) throw OverflowError("bound-state normalisation constant overflows for xi this large");
  return norm_;
}

BoundState bound_wavefunction(const MorseSolution& sol, int n) { return BoundState(sol, n); }

ContinuumState::ContinuumState(const MorseSolution& sol, double k) : k_(k) {
  require_well(sol, "continuum_wavefunction");
  if (!(k > 0.0) || !std::isfinite(k)) throw InvalidParameters("continuum_wavefunction: k > 0 is required");
  xi_ = sol.xi;
  beta_ = sol.params.beta;
  alpha_xi2_ = 2.0 * sol.params.alpha * sol.xi;
  const double log_abs_gamma = specfun::log_gamma(cplx(0.5 - xi_, k)).real();
  const double log_abs_gamma2 = specfun::log_gamma(cplx(0.0, 2.0 * k)).real();
  norm_ = std::sqrt(2.0 * beta_ / std::numbers::pi) * 0.5 * std::exp(log_abs_gamma - log_abs_gamma2);
  const double hb = sol.params.hbar * beta_;
  energy_ = threshold_energy(sol) + sol.coeffs.d * hb * hb * k * k;
}

double ContinuumState::operator()(double x_r) const {
  const double lz = std::log(alpha_xi2_) - beta_ * x_r;
  const double z = std::exp(lz);
  if (z > 700.0) return 0.0;
  const cplx w = specfun::whittaker_w(xi_, cplx(0.0, k_), z);
  return norm_ * std::exp(-0.5 * lz) * w.real();
}

double ContinuumState::imaginary_residue(double x_r) const {
  const double z = alpha_xi2_ * std::exp(-beta_ * x_r);
  const cplx w = specfun::whittaker_w(xi_, cplx(0.0, k_), z);
  return std::abs(w.imag()) / std::abs(w);
}

double ContinuumState::asymptotic_amplitude() const { return std::sqrt(2.0 * beta_ / std::numbers::pi); }

ContinuumState continuum_wavefunction(const MorseSolution& sol, double k) { return ContinuumState(sol, k); }

double green_function(const MorseSolution& sol, double E, double x1r, double x2r) {
  const GreenPieces g = green_pieces(sol, E, x1r, x2r);
  if (g.a <= 0.0 && std::abs(g.a - std::round(g.a)) < 1e-9) {
    throw PoleError("green_function: E is at a bound-state pole (n = " +
                    std::to_string(static_cast<int>(-std::round(g.a))) + ")");
  }
  const auto& p = sol.params;
  const double log_ratio = std::lgamma(g.a) - std::lgamma(1.0 + 2.0 * g.eta);
  const double w = specfun::whittaker_w(sol.xi, g.eta, g.z_large);
  const double m = specfun::whittaker_m(sol.xi, g.eta, g.z_small);
  const double scale = p.hbar * p.hbar * sol.coeffs.d * p.beta;
  return gamma_sign(g.a) * std::exp(log_ratio - g.log_sqrt_zz) * w * m / scale;
}

double inverse_green_function(const MorseSolution& sol, double E, double x1r, double x2r) {
  const GreenPieces g = green_pieces(sol, E, x1r, x2r);
  const auto& p = sol.params;
  const double w = specfun::whittaker_w(sol.xi, g.eta, g.z_large);
  const double m = specfun::whittaker_m(sol.xi, g.eta, g.z_small);
  const double scale = p.hbar * p.hbar * sol.coeffs.d * p.beta;
  return scale * specfun::rgamma(g.a) * std::exp(std::lgamma(1.0 + 2.0 * g.eta) + g.log_sqrt_zz) / (w * m);
}

EffectiveRelativeProblem relative_problem(const SystemParams& params) {
  const ReducedCoeffs c = reduce(params);
  EffectiveRelativeProblem prob;
  prob.mass_eff = 1.0 / (2.0 * c.d);
  prob.hbar = params.hbar;
  prob.potential = [params](double x) { return potential(params, x); };
  const double x_min = well_minimum(params);
  prob.x_hi = x_min + 40.0 / params.beta;
  if (params.lambda > 0.0) {
    // The highest bound level decays as e^{-beta s x}, s = xi - n_top - 1/2.
    const double xi = std::sqrt(params.lambda / c.d) / (params.hbar * params.beta);
    if (xi > 0.5) {
      const double s_top = xi - std::ceil(xi - 0.5) + 0.5;
      prob.x_hi = x_min + std::min(std::max(40.0, 20.0 / s_top), 2000.0) / params.beta;
    }
    // Left wall where V reaches lambda + 30 hbar omega, omega the harmonic
    // frequency at the well bottom.
    const double hw = 2.0 * params.hbar * params.beta * std::sqrt(params.lambda * c.d);
    const double root = 1.0 + std::sqrt(1.0 + 30.0 * hw / params.lambda);
    prob.x_lo = -std::log(root / params.alpha) / params.beta;
  } else {
    prob.x_lo = x_min - 20.0 / params.beta;
  }
  return prob;
}

EffectiveRelativeProblem with_custom_potential(const SystemParams& params, std::function<double(double)> V,
                                               double x_lo, double x_hi) {
  const ReducedCoeffs c = reduce(params);
  if (!V) throw InvalidParameters("with_custom_potential: potential evaluator is empty");
  if (!(x_hi > x_lo)) throw InvalidParameters("with_custom_potential: x_hi > x_lo is required");
  EffectiveRelativeProblem prob;
  prob.mass_eff = 1.0 / (2.0 * c.d);
  prob.hbar = params.hbar;
  prob.potential = std::move(V);
  prob.x_lo = x_lo;
  prob.x_hi = x_hi;
  return prob;
}

}  // namespace kincouple::morse
