#pragma once

// Normal modes of a quadratic Lagrangian L = 1/2 phi' A phi' - 1/2 phi K phi.
//
// The basis is normalised to unit normal masses: with xi = C phi the kinetic
// term becomes 1/2 |xi'|^2 and the potential 1/2 sum omega2_k xi_k^2.

#include <Eigen/Dense>

namespace kincouple::modes {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct QuadraticSystem {
  Matrix A;  // inertia form, symmetric positive definite
  Matrix K;  // stiffness form, symmetric
  int n() const { return static_cast<int>(A.rows()); }
};

/// Throws DimensionMismatch or InvalidParameters (asymmetric or singular A).
void validate(const QuadraticSystem& sys);

/// Harmonic double pendulum: A = l^2 [[M, m2], [m2, m2]], K = g l diag(M, m2).
QuadraticSystem pendulum_matrices(double m1, double m2, double l, double g);

struct NormalModeBasis {
  Matrix C;        // xi = C phi, C^T C = A
  Matrix C_inv;
  Vector omega2;   // ascending
  double det_C = 0.0;  // |det C| = sqrt(det A)
  int n() const { return static_cast<int>(omega2.size()); }
};

/// Cholesky reduction A = L L^T, then a symmetric eigensolve of L^-1 K L^-T.
/// Each row of C is signed so its largest-magnitude entry is positive.
NormalModeBasis generalized_modes(const QuadraticSystem& sys);

Vector to_normal(const NormalModeBasis& basis, const Vector& phi);
Vector from_normal(const NormalModeBasis& basis, const Vector& xi);

/// Closed-form pendulum coordinates, r = sqrt(m2/M):
///   xi_1 = l sqrt(M (1-r)/2) (phi_1 - r phi_2)   (omega^2 = g M (1+r) / (m1 l))
///   xi_2 = l sqrt(M (1+r)/2) (phi_1 + r phi_2)   (omega^2 = g M (1-r) / (m1 l))
/// Note xi_1 is the faster mode, so it matches row 1 of generalized_modes.
Vector pendulum_normal_explicit(double m1, double m2, double l, const Vector& phi);

/// g M (1 -/+ r) / (m1 l), ascending.
Vector pendulum_omega2_explicit(double m1, double m2, double l, double g);

}  // namespace kincouple::modes
