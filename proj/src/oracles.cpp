#include "kincouple/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <random>
#include <string>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "kincouple/errors.hpp"

namespace kincouple::oracles {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = 2.220446049250313e-16;

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidParameters(std::string(what) + " must be positive and finite");
}

// Tridiagonal LU with partial pivoting (row interchanges), LAPACK gttrf layout.
struct TridiagonalLU {
  std::vector<double> dl, d, du, du2;
  std::vector<char> swapped;

  TridiagonalLU(std::vector<double> sub, std::vector<double> diag, std::vector<double> sup)
      : dl(std::move(sub)), d(std::move(diag)), du(std::move(sup)) {
    const std::size_t n = d.size();
    du2.assign(n, 0.0);
    swapped.assign(n, 0);
    const double tiny = 1e-300;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(d[i]) >= std::abs(dl[i])) {
        if (d[i] == 0.0) d[i] = tiny;
        const double fact = dl[i] / d[i];
        dl[i] = fact;
        d[i + 1] -= fact * du[i];
      } else {
        const double fact = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = fact;
        const double temp = du[i];
        du[i] = d[i + 1];
        d[i + 1] = temp - fact * d[i + 1];
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -fact * du[i + 1];
        }
        swapped[i] = 1;
      }
    }
    if (n > 0 && d[n - 1] == 0.0) d[n - 1] = tiny;
  }

  void solve(std::vector<double>& b) const {
    const std::size_t n = d.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!swapped[i]) {
        b[i + 1] -= dl[i] * b[i];
      } else {
        const double temp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = temp - dl[i] * b[i];
      }
    }
    b[n - 1] /= d[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (std::size_t k = n; k-- > 2;) {
      const std::size_t i = k - 2;
      b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
    }
  }
};

struct Tridiagonal {
  std::vector<double> diag;
  double off = 0.0;  // constant off-diagonal
};

Tridiagonal assemble_1d(double mass, const std::function<double(double)>& V, const Grid1D& grid, double hbar) {
  const double h = grid.spacing();
  const double t = hbar * hbar / (2.0 * mass * h * h);
  Tridiagonal tri;
  tri.off = -t;
  tri.diag.resize(grid.n_points - 2);
  for (int i = 1; i + 1 < grid.n_points; ++i) {
    const double v = V(grid.x(i));
    if (!std::isfinite(v)) throw InvalidParameters("potential is not finite on the grid");
    tri.diag[i - 1] = 2.0 * t + v;
  }
  return tri;
}

int sturm_count(const Tridiagonal& tri, double x) {
  const double e2 = tri.off * tri.off;
  const double tiny = kEps * std::abs(tri.off) + 1e-300;
  int count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < tri.diag.size(); ++i) {
    q = tri.diag[i] - x - (i == 0 ? 0.0 : e2 / q);
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

double bisect_eigenvalue(const Tridiagonal& tri, int k, double lo, double hi) {
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(tri, mid) > k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> inverse_iteration(const Tridiagonal& tri, double lambda, const std::vector<std::vector<double>>& prev,
                                      double h) {
  const std::size_t n = tri.diag.size();
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = tri.diag[i] - lambda;
  const TridiagonalLU lu(std::vector<double>(n, tri.off), diag, std::vector<double>(n, tri.off));
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = 1.0 + 0.1 * u(rng);
  const double scale = std::max(std::abs(lambda), 4.0 * std::abs(tri.off)) + 1.0;
  for (int it = 0; it < 12; ++it) {
    lu.solve(x);
    for (const auto& p : prev) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += p[i + 1] * x[i] * h;
      for (std::size_t i = 0; i < n; ++i) x[i] -= dot * p[i + 1];
    }
    double norm = 0.0;
    for (double v : x) norm += v * v * h;
    norm = std::sqrt(norm);
    for (auto& v : x) v /= norm;
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = (tri.diag[i] - lambda) * x[i];
      if (i > 0) r += tri.off * x[i - 1];
      if (i + 1 < n) r += tri.off * x[i + 1];
      res += r * r * h;
    }
    if (it >= 2 && std::sqrt(res) < 1e-9 * scale) return x;
  }
  throw NoConvergence("inverse iteration did not converge for E = " + std::to_string(lambda));
}

void fix_sign(std::vector<double>& v) {
  auto it = std::max_element(v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  if (it != v.end() && *it < 0.0) {
    for (auto& x : v) x = -x;
  }
}

// Determinant by Gaussian elimination with partial pivoting on a plain copy.
double lu_determinant(std::vector<double> m, int n) {
  double det = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r) {
      if (std::abs(m[r * n + c]) > std::abs(m[piv * n + c])) piv = r;
    }
    if (m[piv * n + c] == 0.0) return 0.0;
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(m[c * n + j], m[piv * n + j]);
      det = -det;
    }
    const double p = m[c * n + c];
    det *= p;
    for (int r = c + 1; r < n; ++r) {
      const double f = m[r * n + c] / p;
      for (int j = c; j < n; ++j) m[r * n + j] -= f * m[c * n + j];
    }
  }
  return det;
}

// Solves M X = B in place (B is n x k, row-major) by partial-pivot elimination.
void lu_solve(std::vector<double> m, std::vector<double>& b, int n, int k) {
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r) {
      if (std::abs(m[r * n + c]) > std::abs(m[piv * n + c])) piv = r;
    }
    if (m[piv * n + c] == 0.0) throw InvalidParameters("A is singular");
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(m[c * n + j], m[piv * n + j]);
      for (int j = 0; j < k; ++j) std::swap(b[c * k + j], b[piv * k + j]);
    }
    for (int r = c + 1; r < n; ++r) {
      const double f = m[r * n + c] / m[c * n + c];
      for (int j = c; j < n; ++j) m[r * n + j] -= f * m[c * n + j];
      for (int j = 0; j < k; ++j) b[r * k + j] -= f * b[c * k + j];
    }
  }
  for (int c = n - 1; c >= 0; --c) {
    for (int j = 0; j < k; ++j) {
      double s = b[c * k + j];
      for (int i = c + 1; i < n; ++i) s -= m[c * n + i] * b[i * k + j];
      b[c * k + j] = s / m[c * n + c];
    }
  }
}

struct PencilDet {
  std::vector<double> A, K;
  int n;
  double operator()(double s) const {
    std::vector<double> m(K.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = K[i] - s * A[i];
    return lu_determinant(std::move(m), n);
  }
};

std::vector<double> flatten(const Matrix& m) {
  std::vector<double> out(m.size());
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) out[r * m.cols() + c] = m(r, c);
  }
  return out;
}

double bisect_sign_change(const PencilDet& det, double a, double b, double fa) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const double fm = det(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

// Golden-section minimum of g on [a, b].
double golden_min(const std::function<double(double)>& g, double a, double b) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double gc = g(c);
  double gd = g(d);
  for (int it = 0; it < 200 && b - a > 4.0 * kEps * std::max(1.0, std::abs(a)); ++it) {
    if (gc < gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - r * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + r * (b - a);
      gd = g(d);
    }
  }
  return 0.5 * (a + b);
}

// Minimum of |det| for an even-multiplicity root: bisect on the sign of the
// symmetric difference |det(s + delta)| - |det(s - delta)|.
double refine_touching_root(const PencilDet& det, double a, double b) {
  const double delta = 1e-6 * (b - a);
  auto slope = [&](double s) { return std::abs(det(s + delta)) - std::abs(det(s - delta)); };
  double fa = slope(a);
  if (fa >= 0.0 || slope(b) <= 0.0) return golden_min([&](double s) { return std::abs(det(s)); }, a, b);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    if (slope(mid) < 0.0) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

void validate(const Grid1D& g) {
  if (!std::isfinite(g.lo) || !std::isfinite(g.hi) || !(g.hi > g.lo)) throw InvalidParameters("grid needs hi > lo");
  if (g.n_points < 8) throw InvalidParameters("grid needs at least 8 points");
  if (static_cast<std::size_t>(g.n_points) > kMaxGridNodes) throw MemoryGuard("grid exceeds 2^24 nodes");
}

void validate(const Grid2D& g) {
  for (int a = 0; a < 2; ++a) {
    if (!std::isfinite(g.lo[a]) || !std::isfinite(g.hi[a]) || !(g.hi[a] > g.lo[a])) {
      throw InvalidParameters("grid needs hi > lo on every axis");
    }
    if (g.n[a] < 8) throw InvalidParameters("grid needs at least 8 points per axis");
  }
  if (static_cast<double>(g.n[0]) * g.n[1] > static_cast<double>(kMaxGridNodes)) {
    throw MemoryGuard("grid exceeds 2^24 nodes");
  }
}

Spectrum1D fd_spectrum(double mass, const std::function<double(double)>& V, const Grid1D& grid, int n_levels,
                       double hbar) {
  validate(grid);
  check_positive(mass, "mass");
  check_positive(hbar, "hbar");
  if (n_levels < 1 || 4 * n_levels >= grid.n_points) throw InvalidParameters("need 1 <= n_levels < n_points/4");
  const Tridiagonal tri = assemble_1d(mass, V, grid, hbar);
  const double spread = 2.0 * std::abs(tri.off);
  const double lo = *std::min_element(tri.diag.begin(), tri.diag.end()) - spread;
  const double hi = *std::max_element(tri.diag.begin(), tri.diag.end()) + spread;
  const double h = grid.spacing();

  Spectrum1D out;
  for (int k = 0; k < n_levels; ++k) {
    const double E = bisect_eigenvalue(tri, k, lo, hi);
    std::vector<double> inner = inverse_iteration(tri, E, out.vectors, h);
    std::vector<double> full(grid.n_points, 0.0);
    std::copy(inner.begin(), inner.end(), full.begin() + 1);
    fix_sign(full);
    out.energies.push_back(E);
    out.vectors.push_back(std::move(full));
  }
  return out;
}

int fd_count_below(double mass, const std::function<double(double)>& V, const Grid1D& grid, double E, double hbar) {
  validate(grid);
  check_positive(mass, "mass");
  check_positive(hbar, "hbar");
  return sturm_count(assemble_1d(mass, V, grid, hbar), E);
}

Spectrum2D fd_spectrum_2d(const Matrix& G, const std::function<double(double, double)>& V, const Grid2D& grid,
                          int n_levels, double hbar) {
  validate(grid);
  check_positive(hbar, "hbar");
  if (G.rows() != 2 || G.cols() != 2) throw DimensionMismatch("inverse-mass matrix must be 2x2");
  if (std::abs(G(0, 1) - G(1, 0)) > 1e-12 * G.cwiseAbs().maxCoeff()) {
    throw InvalidParameters("inverse-mass matrix must be symmetric");
  }
  if (!(G(0, 0) > 0.0) || !(G(0, 0) * G(1, 1) - G(0, 1) * G(1, 0) > 0.0)) {
    throw InvalidParameters("inverse-mass matrix must be positive definite");
  }
  const int nx = grid.n[0] - 2;
  const int ny = grid.n[1] - 2;
  const int N = nx * ny;
  if (n_levels < 1 || 4 * n_levels >= N) throw InvalidParameters("need 1 <= n_levels < interior nodes / 4");
  const double hx = grid.spacing(0);
  const double hy = grid.spacing(1);
  const double c = 0.5 * hbar * hbar;
  const double cx = c * G(0, 0) / (hx * hx);
  const double cy = c * G(1, 1) / (hy * hy);
  const double cxy = c * 2.0 * G(0, 1) / (4.0 * hx * hy);

  auto id = [ny](int i, int j) { return i * ny + j; };
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(N) * 9);
  double vmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const double v = V(grid.coord(0, i + 1), grid.coord(1, j + 1));
      if (!std::isfinite(v)) throw InvalidParameters("potential is not finite on the grid");
      vmin = std::min(vmin, v);
      const int r = id(i, j);
      trip.emplace_back(r, r, 2.0 * cx + 2.0 * cy + v);
      if (i > 0) trip.emplace_back(r, id(i - 1, j), -cx);
      if (i + 1 < nx) trip.emplace_back(r, id(i + 1, j), -cx);
      if (j > 0) trip.emplace_back(r, id(i, j - 1), -cy);
      if (j + 1 < ny) trip.emplace_back(r, id(i, j + 1), -cy);
      if (cxy != 0.0) {
        if (i + 1 < nx && j + 1 < ny) trip.emplace_back(r, id(i + 1, j + 1), -cxy);
        if (i > 0 && j > 0) trip.emplace_back(r, id(i - 1, j - 1), -cxy);
        if (i + 1 < nx && j > 0) trip.emplace_back(r, id(i + 1, j - 1), cxy);
        if (i > 0 && j + 1 < ny) trip.emplace_back(r, id(i - 1, j + 1), cxy);
      }
    }
  }
  Eigen::SparseMatrix<double> H(N, N);
  H.setFromTriplets(trip.begin(), trip.end());

  // The discrete kinetic operator is positive definite under Dirichlet
  // conditions, so H - vmin is as well.
  Eigen::SparseMatrix<double> shifted = H;
  for (int r = 0; r < N; ++r) shifted.coeffRef(r, r) -= vmin;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(shifted);
  if (ldlt.info() != Eigen::Success) throw NoConvergence("sparse factorisation failed");

  const int m = std::min(N, n_levels + 6);
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> nd;
  Matrix X(N, m);
  for (int r = 0; r < N; ++r) {
    for (int k = 0; k < m; ++k) X(r, k) = nd(rng);
  }
  Vector prev = Vector::Constant(n_levels, std::numeric_limits<double>::infinity());
  Vector theta;
  Matrix Qm;
  bool converged = false;
  for (int it = 0; it < 1000; ++it) {
    Matrix Y = ldlt.solve(X);
    Eigen::HouseholderQR<Matrix> qr(Y);
    Qm = qr.householderQ() * Matrix::Identity(N, m);
    Matrix Hs = Qm.transpose() * (H * Qm);
    Hs = 0.5 * (Hs + Hs.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(Hs);
    theta = eig.eigenvalues();
    X = Qm * eig.eigenvectors();
    const Vector cur = theta.head(n_levels);
    double change = 0.0;
    for (int k = 0; k < n_levels; ++k) change = std::max(change, std::abs(cur(k) - prev(k)) / std::max(1.0, std::abs(cur(k))));
    prev = cur;
    if (change < 1e-14 && it > 2) {
      double worst = 0.0;
      for (int k = 0; k < n_levels; ++k) {
        worst = std::max(worst, (H * X.col(k) - theta(k) * X.col(k)).norm() / std::max(1.0, std::abs(theta(k))));
      }
      if (worst < 1e-8) {
        converged = true;
        break;
      }
    }
  }
  if (!converged) throw NoConvergence("subspace iteration did not converge");

  Spectrum2D out;
  const double w = std::sqrt(hx * hy);
  for (int k = 0; k < n_levels; ++k) {
    out.energies.push_back(theta(k));
    std::vector<double> full(grid.size(), 0.0);
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) full[grid.index(i + 1, j + 1)] = X(id(i, j), k) / w;
    }
    fix_sign(full);
    out.vectors.push_back(std::move(full));
  }
  return out;
}

double richardson(double coarse, double fine, double order) {
  const double f = std::pow(2.0, order);
  return (f * fine - coarse) / (f - 1.0);
}

LatticeResult lattice_kernel(const Matrix& A, const Matrix& K, const LatticeSpec& spec, const Grid2D& grid,
                             const Vector& phi1, const Vector& phi2, double hbar) {
  validate(grid);
  check_positive(hbar, "hbar");
  check_positive(spec.T, "imaginary time");
  if (spec.n_slices < 1) throw InvalidParameters("n_slices must be at least 1");
  if (A.rows() != 2 || A.cols() != 2 || K.rows() != 2 || K.cols() != 2 || phi1.size() != 2 || phi2.size() != 2) {
    throw DimensionMismatch("lattice kernel works with two degrees of freedom");
  }
  const double detA = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
  if (!(A(0, 0) > 0.0) || !(detA > 0.0)) throw InvalidParameters("A must be positive definite");

  const double eps = spec.T / spec.n_slices;
  const double measure = std::sqrt(detA) / (2.0 * kPi * hbar * eps);
  auto potential = [&K](double x, double y) {
    return 0.5 * (K(0, 0) * x * x + (K(0, 1) + K(1, 0)) * x * y + K(1, 1) * y * y);
  };
  auto kinetic = [&A, eps, hbar](double dx, double dy) {
    return (A(0, 0) * dx * dx + (A(0, 1) + A(1, 0)) * dx * dy + A(1, 1) * dy * dy) / (2.0 * hbar * eps);
  };
  auto short_time = [&](double xa, double ya, double xb, double yb) {
    return measure * std::exp(-kinetic(xb - xa, yb - ya) - eps * (potential(xa, ya) + potential(xb, yb)) / (2.0 * hbar));
  };

  LatticeResult res;
  if (spec.n_slices == 1) {
    res.value = short_time(phi1(0), phi1(1), phi2(0), phi2(1));
    return res;
  }

  const int nx = grid.n[0];
  const int ny = grid.n[1];
  const double hx = grid.spacing(0);
  const double hy = grid.spacing(1);
  const std::size_t size = grid.size();

  // Window of grid offsets that carry kinetic weight.
  struct Offset {
    int di, dj;
    double w;
  };
  std::vector<Offset> window;
  const double cut = 36.0;
  const Matrix Ainv = A.inverse();
  const int rx = static_cast<int>(std::ceil(std::sqrt(2.0 * cut * hbar * eps * Ainv(0, 0)) / hx)) + 1;
  const int ry = static_cast<int>(std::ceil(std::sqrt(2.0 * cut * hbar * eps * Ainv(1, 1)) / hy)) + 1;
  for (int di = -rx; di <= rx; ++di) {
    for (int dj = -ry; dj <= ry; ++dj) {
      const double q = kinetic(di * hx, dj * hy);
      if (q < cut) window.push_back({di, dj, measure * hx * hy * std::exp(-q)});
    }
  }

  std::vector<double> half(size);  // e^{-eps V / 2 hbar}
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      half[grid.index(i, j)] = std::exp(-eps * potential(grid.coord(0, i), grid.coord(1, j)) / (2.0 * hbar));
    }
  }

  auto first_slice = [&](const Vector& p) {
    std::vector<double> f(size);
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) f[grid.index(i, j)] = short_time(p(0), p(1), grid.coord(0, i), grid.coord(1, j));
    }
    return f;
  };
  auto step = [&](const std::vector<double>& f) {
    std::vector<double> g(size);
    for (std::size_t k = 0; k < size; ++k) g[k] = f[k] * half[k];
    std::vector<double> out(size, 0.0);
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) {
        double acc = 0.0;
        for (const auto& o : window) {
          const int ii = i + o.di;
          const int jj = j + o.dj;
          if (ii < 0 || ii >= nx || jj < 0 || jj >= ny) continue;
          acc += o.w * g[grid.index(ii, jj)];
        }
        out[grid.index(i, j)] = acc * half[grid.index(i, j)];
      }
    }
    return out;
  };

  // Forward from phi1 and backward from phi2, joined at the middle slice.
  const int n_fwd = spec.n_slices / 2;
  const int n_bwd = spec.n_slices - n_fwd;
  std::vector<double> f = first_slice(phi1);
  for (int s = 1; s < n_fwd; ++s) f = step(f);
  std::vector<double> b = first_slice(phi2);
  for (int s = 1; s < n_bwd; ++s) b = step(b);

  double total = 0.0;
  double edge = 0.0;
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const double v = f[grid.index(i, j)] * b[grid.index(i, j)];
      total += v;
      if (i == 0 || j == 0 || i == nx - 1 || j == ny - 1) edge += v;
    }
  }
  res.value = total * hx * hy;
  res.boundary_mass = total > 0.0 ? edge / total : 1.0;
  res.truncated = res.boundary_mass > 1e-8;
  return res;
}

Grid2D lattice_auto_grid(const Matrix& A, const LatticeSpec& spec, const Vector& phi1, const Vector& phi2,
                         double hbar) {
  check_positive(hbar, "hbar");
  check_positive(spec.T, "imaginary time");
  if (spec.n_slices < 1) throw InvalidParameters("n_slices must be at least 1");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(A.inverse());
  const double lmin = eig.eigenvalues()(0);
  const double lmax = eig.eigenvalues()(1);
  const double eps = spec.T / spec.n_slices;
  const double h = std::sqrt(hbar * eps * lmin);
  const double margin = 6.0 * std::sqrt(hbar * spec.T * lmax / 4.0) + 2.0 * h;
  Grid2D g;
  for (int a = 0; a < 2; ++a) {
    const double lo = std::min(phi1(a), phi2(a)) - margin;
    const double hi = std::max(phi1(a), phi2(a)) + margin;
    const int n = std::max(8, static_cast<int>(std::ceil((hi - lo) / h)) + 1);
    g.lo[a] = lo;
    g.hi[a] = hi;
    g.n[a] = n;
  }
  validate(g);
  return g;
}

ConvolvedFn convolve_kernels(KernelFn kernel, const Grid2D& grid, double T1, double T2) {
  validate(grid);
  check_positive(T1, "T1");
  check_positive(T2, "T2");
  if (!kernel) throw InvalidParameters("kernel evaluator is empty");
  return [kernel = std::move(kernel), grid, T1, T2](const Vector& to, const Vector& from) {
    const double hx = grid.spacing(0);
    const double hy = grid.spacing(1);
    double total = 0.0;
    double edge = 0.0;
    double absolute = 0.0;
    Vector phi(2);
    for (int i = 0; i < grid.n[0]; ++i) {
      const double wx = (i == 0 || i == grid.n[0] - 1) ? 0.5 : 1.0;
      phi(0) = grid.coord(0, i);
      for (int j = 0; j < grid.n[1]; ++j) {
        const double wy = (j == 0 || j == grid.n[1] - 1) ? 0.5 : 1.0;
        phi(1) = grid.coord(1, j);
        const double v = kernel(to, phi, T1) * kernel(phi, from, T2);
        total += wx * wy * v;
        absolute += std::abs(v);
        if (wx * wy < 1.0) edge += std::abs(v);
      }
    }
    ConvolutionResult r;
    r.value = total * hx * hy;
    r.boundary_mass = absolute > 0.0 ? edge / absolute : 1.0;
    r.truncated = r.boundary_mass > 1e-8;
    return r;
  };
}

namespace {

// Gauss-Kronrod 7-15 on [-1, 1]: nodes for x >= 0.
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkResult {
  double value;
  double error;
};

GkResult gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double s = f(c - dx) + f(c + dx);
    kron += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  return {kron * h, std::abs((kron - gauss) * h)};
}

struct Interval {
  double a, b, value, error;
  bool operator<(const Interval& o) const { return error < o.error; }
};

}  // namespace

double quadrature(const std::function<double(double)>& f, double lo, double hi, double abs_tol) {
  if (!(abs_tol > 1e-14)) throw InvalidParameters("quadrature tolerance must exceed 1e-14");
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw InvalidParameters("quadrature bounds must be finite");
  if (lo == hi) return 0.0;
  if (hi < lo) return -quadrature(f, hi, lo, abs_tol);
  // Global refinement: always bisect the interval with the largest error.
  std::priority_queue<Interval> heap;
  const GkResult first = gauss_kronrod(f, lo, hi);
  heap.push({lo, hi, first.value, first.error});
  double total = first.value;
  double error = first.error;
  constexpr int kMaxIntervals = 20000;
  while (error > abs_tol) {
    if (static_cast<int>(heap.size()) >= kMaxIntervals) {
      throw NoConvergence("quadrature exceeded the maximum subdivision depth");
    }
    const Interval worst = heap.top();
    const double m = 0.5 * (worst.a + worst.b);
    if (!(m > worst.a && m < worst.b) || worst.b - worst.a < 64.0 * kEps * std::max(1.0, std::abs(m))) {
      throw NoConvergence("quadrature exceeded the maximum subdivision depth");
    }
    heap.pop();
    const GkResult left = gauss_kronrod(f, worst.a, m);
    const GkResult right = gauss_kronrod(f, m, worst.b);
    heap.push({worst.a, m, left.value, left.error});
    heap.push({m, worst.b, right.value, right.error});
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    if (error <= abs_tol) break;
    // Re-sum occasionally to shed accumulated rounding in the running totals.
    if (heap.size() % 256 == 0) {
      auto copy = heap;
      total = 0.0;
      error = 0.0;
      while (!copy.empty()) {
        total += copy.top().value;
        error += copy.top().error;
        copy.pop();
      }
    }
  }
  // Final deterministic sum in position order.
  std::vector<Interval> parts;
  while (!heap.empty()) {
    parts.push_back(heap.top());
    heap.pop();
  }
  std::sort(parts.begin(), parts.end(), [](const Interval& x, const Interval& y) { return x.a < y.a; });
  total = 0.0;
  for (const auto& p : parts) total += p.value;
  return total;
}

std::vector<ModeRoot> brute_modes(const Matrix& A, const Matrix& K, double omega2_max, int n_scan) {
  const int n = static_cast<int>(A.rows());
  if (n == 0 || A.cols() != n || K.rows() != n || K.cols() != n) throw DimensionMismatch("A and K must be square");
  check_positive(omega2_max, "omega2_max");
  if (n_scan < 4) throw InvalidParameters("n_scan must be at least 4");
  const PencilDet det{flatten(A), flatten(K), n};

  const double step = omega2_max / n_scan;
  std::vector<double> s(n_scan + 1), v(n_scan + 1);
  double scale = 0.0;
  for (int i = 0; i <= n_scan; ++i) {
    s[i] = i * step;
    v[i] = det(s[i]);
    scale = std::max(scale, std::abs(v[i]));
  }
  if (scale == 0.0) throw InvalidParameters("det(K - s A) vanishes identically");

  std::vector<double> found;
  for (int i = 0; i <= n_scan; ++i) {
    if (v[i] == 0.0) {
      found.push_back(s[i]);
      continue;
    }
    if (i < n_scan && v[i + 1] != 0.0 && (v[i] < 0.0) != (v[i + 1] < 0.0)) {
      found.push_back(bisect_sign_change(det, s[i], s[i + 1], v[i]));
      continue;
    }
    const bool interior = i > 0 && i < n_scan;
    if (interior && v[i - 1] != 0.0 && v[i + 1] != 0.0 && (v[i - 1] < 0.0) == (v[i] < 0.0) &&
        (v[i + 1] < 0.0) == (v[i] < 0.0) && std::abs(v[i]) < std::abs(v[i - 1]) &&
        std::abs(v[i]) < std::abs(v[i + 1])) {
      // Extremum of det toward zero: a close pair or an even-order root.
      const double sign = v[i] < 0.0 ? -1.0 : 1.0;
      const double smin = golden_min([&](double x) { return sign * det(x); }, s[i - 1], s[i + 1]);
      const double vmin = det(smin);
      if ((vmin < 0.0) != (v[i] < 0.0) && vmin != 0.0) {
        found.push_back(bisect_sign_change(det, s[i - 1], smin, v[i - 1]));
        found.push_back(bisect_sign_change(det, smin, s[i + 1], vmin));
      } else if (std::abs(vmin) <= 1e-9 * scale) {
        found.push_back(refine_touching_root(det, s[i - 1], s[i + 1]));
      }
    }
  }
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end(),
                          [&](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }),
              found.end());

  std::vector<ModeRoot> roots;
  for (std::size_t k = 0; k < found.size(); ++k) {
    const double s0 = found[k];
    double gap = omega2_max;
    if (k > 0) gap = std::min(gap, s0 - found[k - 1]);
    if (k + 1 < found.size()) gap = std::min(gap, found[k + 1] - s0);
    const double h = std::min(1e-4 * std::max(1.0, std::abs(s0)), 0.05 * gap);
    const double d1 = std::abs(det(s0 + h));
    const double d2 = std::abs(det(s0 + 2.0 * h));
    int mult = 1;
    if (d1 > 0.0 && d2 > 0.0) mult = static_cast<int>(std::lround(std::log2(d2 / d1)));
    ModeRoot r;
    r.omega2 = s0;
    r.multiplicity = std::clamp(mult, 1, n);
    r.at_boundary = s0 < step || s0 > omega2_max - step;
    roots.push_back(r);
  }
  return roots;
}

std::vector<double> expand_roots(const std::vector<ModeRoot>& roots) {
  std::vector<double> out;
  for (const auto& r : roots) out.insert(out.end(), r.multiplicity, r.omega2);
  std::sort(out.begin(), out.end());
  return out;
}

double brute_root_bound(const Matrix& A, const Matrix& K) {
  const int n = static_cast<int>(A.rows());
  if (n == 0 || A.cols() != n || K.rows() != n || K.cols() != n) throw DimensionMismatch("A and K must be square");
  std::vector<double> b = flatten(K);
  lu_solve(flatten(A), b, n, n);
  double tr = 0.0;
  for (int i = 0; i < n; ++i) tr += b[i * n + i];
  return tr;
}

}  // namespace kincouple::oracles
