#pragma once

// Two-particle parameters for the momentum-coupled Morse system and the
// centre-of-mass / relative change of variables.
//
//   H = P1^2/(2 m1) + P2^2/(2 m2) + kappa P1 P2 + lambda (1 - alpha e^{-beta (x1 - x2 - r0)})^2
//
// In (X, x_r, P, P_r) the kinetic form becomes a P^2 + d P_r^2 + 2 b P P_r.

namespace kincouple {

struct SystemParams {
  double m1 = 1.0;
  double m2 = 1.0;
  double kappa = 0.0;   // kinetic coupling, inverse mass
  double lambda = 0.0;  // well depth
  double alpha = 1.0;
  double beta = 1.0;    // inverse range
  double r0 = 0.0;      // equilibrium separation
  double hbar = 1.0;
};

/// Throws InvalidParameters naming the first violated invariant.
void validate(const SystemParams& p);

struct ReducedCoeffs {
  double M_total = 0.0;
  double mu = 0.0;   // reduced mass
  double mu1 = 0.0;  // m1 / M
  double mu2 = 0.0;  // m2 / M
  double a = 0.0;    // P^2 coefficient
  double d = 0.0;    // P_r^2 coefficient
  double b = 0.0;    // half the P P_r coefficient
  double D = 0.0;    // a d - b^2
};

ReducedCoeffs reduce(const SystemParams& p);

struct PhaseSpacePoint {
  double x1 = 0.0;
  double x2 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
};

struct ComRelativePoint {
  double X = 0.0;
  double xr = 0.0;  // x1 - x2 - r0
  double P = 0.0;
  double Pr = 0.0;
};

ComRelativePoint to_com_relative(const PhaseSpacePoint& pt, const SystemParams& p);

/// Inverse of to_com_relative; uses x1 - x2 = x_r + r0.
PhaseSpacePoint from_com_relative(const ComRelativePoint& q, const SystemParams& p);

/// P1^2/(2 m1) + P2^2/(2 m2) + kappa P1 P2.
double kinetic_energy(const PhaseSpacePoint& pt, const SystemParams& p);

/// a P^2 + d P_r^2 + 2 b P P_r.
double kinetic_energy(const ComRelativePoint& q, const ReducedCoeffs& c);

}  // namespace kincouple
