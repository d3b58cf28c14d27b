#pragma once

// Brute-force reference solvers. None of these call into morse, modes or
// propagator; they only share potential evaluators with the code they check.

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace kincouple::oracles {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Largest number of grid nodes any oracle will allocate.
constexpr std::size_t kMaxGridNodes = std::size_t{1} << 24;

/// Uniform grid including both end points.
struct Grid1D {
  double lo = 0.0;
  double hi = 1.0;
  int n_points = 8;
  double spacing() const { return (hi - lo) / (n_points - 1); }
  double x(int i) const { return lo + i * spacing(); }
};

/// Tensor grid; node (ix, iy) is stored at index ix * n[1] + iy.
struct Grid2D {
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};
  std::array<int, 2> n{8, 8};
  double spacing(int axis) const { return (hi[axis] - lo[axis]) / (n[axis] - 1); }
  double coord(int axis, int i) const { return lo[axis] + i * spacing(axis); }
  std::size_t size() const { return static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(n[1]); }
  std::size_t index(int ix, int iy) const { return static_cast<std::size_t>(ix) * n[1] + iy; }
};

/// Throws InvalidParameters or MemoryGuard.
void validate(const Grid1D& g);
void validate(const Grid2D& g);

struct Spectrum1D {
  std::vector<double> energies;
  std::vector<std::vector<double>> vectors;  // on every grid node, sum psi^2 h = 1
};

/// Lowest n_levels eigenpairs of -(hbar^2/2m) psi'' + V psi with Dirichlet end
/// points, three-point stencil, Sturm-sequence bisection and inverse iteration.
Spectrum1D fd_spectrum(double mass, const std::function<double(double)>& V, const Grid1D& grid, int n_levels,
                       double hbar);

/// Number of eigenvalues of the discretised operator below E (Sturm count).
int fd_count_below(double mass, const std::function<double(double)>& V, const Grid1D& grid, double E, double hbar);

struct Spectrum2D {
  std::vector<double> energies;
  std::vector<std::vector<double>> vectors;  // on every grid node, sum psi^2 hx hy = 1
};

/// Lowest eigenpairs of 1/2 p^T G p + V (p = -i hbar grad), G symmetric
/// positive definite. Second derivatives use three-point stencils and the
/// mixed derivative the four-corner central stencil, which keeps the discrete
/// kinetic operator positive semi-definite for any such G. Solved by
/// shift-invert subspace iteration.
Spectrum2D fd_spectrum_2d(const Matrix& G, const std::function<double(double, double)>& V, const Grid2D& grid,
                          int n_levels, double hbar);

/// Extrapolates two results of an order-p method at steps h and h/2.
double richardson(double coarse, double fine, double order = 2.0);

struct LatticeSpec {
  int n_slices = 1;
  double T = 1.0;  // imaginary time
};

struct LatticeResult {
  double value = 0.0;
  double boundary_mass = 0.0;  // share of the mid-path density on the grid edge
  bool truncated = false;      // boundary_mass > 1e-8
};

/// Time-sliced Euclidean kernel of L = 1/2 phi' A phi' + 1/2 phi K phi between
/// phi1 and phi2 (two degrees of freedom):
///   prod_j (det A)^{1/2} / (2 pi hbar eps)
///          exp{-[D_j^T A D_j / (2 eps) + eps (V_j + V_{j+1}) / 2] / hbar}
/// with the intermediate points summed on the grid. Offsets with
/// D^T A D / (2 hbar eps) >= 36 are dropped.
LatticeResult lattice_kernel(const Matrix& A, const Matrix& K, const LatticeSpec& spec, const Grid2D& grid,
                             const Vector& phi1, const Vector& phi2, double hbar);

/// Grid covering phi1, phi2 plus six bridge standard deviations, spaced at
/// the short-time width of the stiffest direction.
Grid2D lattice_auto_grid(const Matrix& A, const LatticeSpec& spec, const Vector& phi1, const Vector& phi2,
                         double hbar);

using KernelFn = std::function<double(const Vector& to, const Vector& from, double T)>;

struct ConvolutionResult {
  double value = 0.0;
  double boundary_mass = 0.0;
  bool truncated = false;
};

using ConvolvedFn = std::function<ConvolutionResult(const Vector& to, const Vector& from)>;

/// Trapezoid composition phi2, phi1 -> sum_phi w K(phi2, phi; T1) K(phi, phi1; T2).
ConvolvedFn convolve_kernels(KernelFn kernel, const Grid2D& grid, double T1, double T2);

/// Adaptive Gauss-Kronrod (7, 15): the interval with the largest embedded
/// error estimate is bisected until the summed estimate is below abs_tol.
/// Throws NoConvergence past 20000 intervals or at unsplittable width.
double quadrature(const std::function<double(double)>& f, double lo, double hi, double abs_tol);

struct ModeRoot {
  double omega2 = 0.0;
  int multiplicity = 1;
  bool at_boundary = false;  // found within one scan step of an end of the range
};

/// Roots of s -> det(K - s A) in [0, omega2_max] from a uniform scan,
/// sign-change bisection, and a minimum search on |det| for roots the scan
/// cannot bracket. Multiplicity comes from the local scaling of |det|;
/// roots closer than about 1e-6 of the scale are not separated.
std::vector<ModeRoot> brute_modes(const Matrix& A, const Matrix& K, double omega2_max, int n_scan);

/// Roots repeated by multiplicity, ascending.
std::vector<double> expand_roots(const std::vector<ModeRoot>& roots);

/// Upper bound on the roots for symmetric positive semi-definite K:
/// trace(A^-1 K), by LU solve.
double brute_root_bound(const Matrix& A, const Matrix& K);

}  // namespace kincouple::oracles
