#include "kincouple/normal_modes.hpp"

#include <cmath>
#include <string>

#include "kincouple/errors.hpp"

namespace kincouple::modes {

namespace {

void check_symmetric(const Matrix& m, const char* name) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidParameters(std::string(name) + " must be symmetric");
  }
}

void check_pendulum(double m1, double m2, double l) {
  if (!(m1 > 0.0) || !(m2 > 0.0) || !std::isfinite(m1) || !std::isfinite(m2)) {
    throw InvalidParameters("invalid parameters: pendulum masses must be positive");
  }
  if (!(l > 0.0) || !std::isfinite(l)) throw InvalidParameters("invalid parameters: l > 0 is required");
}

}  // namespace

void validate(const QuadraticSystem& sys) {
  if (sys.A.rows() == 0 || sys.A.rows() != sys.A.cols()) throw DimensionMismatch("A must be square and non-empty");
  if (sys.K.rows() != sys.A.rows() || sys.K.cols() != sys.A.cols()) {
    throw DimensionMismatch("K must have the same shape as A");
  }
  if (!sys.A.allFinite() || !sys.K.allFinite()) throw InvalidParameters("A and K must be finite");
  check_symmetric(sys.A, "A");
  check_symmetric(sys.K, "K");
  Eigen::LLT<Matrix> llt(sys.A);
  if (llt.info() != Eigen::Success) throw InvalidParameters("A must be positive definite (Cholesky failed)");
}

QuadraticSystem pendulum_matrices(double m1, double m2, double l, double g) {
  check_pendulum(m1, m2, l);
  if (!(g > 0.0) || !std::isfinite(g)) throw InvalidParameters("invalid parameters: g > 0 is required");
  const double M = m1 + m2;
  QuadraticSystem sys;
  sys.A = Matrix(2, 2);
  sys.A << M, m2, m2, m2;
  sys.A *= l * l;
  sys.K = Matrix::Zero(2, 2);
  sys.K(0, 0) = g * l * M;
  sys.K(1, 1) = g * l * m2;
  return sys;
}

NormalModeBasis generalized_modes(const QuadraticSystem& sys) {
  validate(sys);
  const int n = sys.n();
  Eigen::LLT<Matrix> llt(sys.A);
  const Matrix L = llt.matrixL();
  // S = L^-1 K L^-T
  Matrix tmp = L.triangularView<Eigen::Lower>().solve(sys.K);
  Matrix S = L.triangularView<Eigen::Lower>().solve(tmp.transpose());
  S = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(S);
  if (eig.info() != Eigen::Success) throw NoConvergence("symmetric eigensolve failed");

  NormalModeBasis basis;
  basis.omega2 = eig.eigenvalues();
  Matrix Q = eig.eigenvectors();
  basis.C = Q.transpose() * L.transpose();
  for (int k = 0; k < n; ++k) {
    Eigen::Index j = 0;
    basis.C.row(k).cwiseAbs().maxCoeff(&j);
    if (basis.C(k, j) < 0.0) {
      basis.C.row(k) *= -1.0;
      Q.col(k) *= -1.0;
    }
  }
  basis.C_inv = L.transpose().triangularView<Eigen::Upper>().solve(Q);
  basis.det_C = L.diagonal().prod();
  return basis;
}

Vector to_normal(const NormalModeBasis& basis, const Vector& phi) {
  if (phi.size() != basis.C.cols()) throw DimensionMismatch("phi has the wrong dimension");
  return basis.C * phi;
}

Vector from_normal(const NormalModeBasis& basis, const Vector& xi) {
  if (xi.size() != basis.C_inv.cols()) throw DimensionMismatch("xi has the wrong dimension");
  return basis.C_inv * xi;
}

Vector pendulum_normal_explicit(double m1, double m2, double l, const Vector& phi) {
  check_pendulum(m1, m2, l);
  if (phi.size() != 2) throw DimensionMismatch("pendulum coordinates are two-dimensional");
  const double M = m1 + m2;
  const double r = std::sqrt(m2 / M);
  Vector xi(2);
  xi(0) = l * std::sqrt(M * (1.0 - r) / 2.0) * (phi(0) - r * phi(1));
  xi(1) = l * std::sqrt(M * (1.0 + r) / 2.0) * (phi(0) + r * phi(1));
  return xi;
}

Vector pendulum_omega2_explicit(double m1, double m2, double l, double g) {
  check_pendulum(m1, m2, l);
  const double M = m1 + m2;
  const double r = std::sqrt(m2 / M);
  const double base = g * M / (m1 * l);
  Vector w(2);
  w << base * (1.0 - r), base * (1.0 + r);
  return w;
}

}  // namespace kincouple::modes
