#pragma once

// Oracle cross-checks behind the `verify` subcommand.

#include <string>
#include <vector>

#include "kincouple/morse.hpp"
#include "kincouple/params.hpp"

namespace kincouple::verify {

struct Check {
  std::string name;
  double error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

/// Bound energies (relative) of the kinetic-coupling Morse problem from the
/// finite-difference oracle, Richardson-extrapolated from spacings h and h/2.
std::vector<double> morse_fd_energies(const SystemParams& p, int n_levels, double h = 0.005);

/// Zeros of 1/G(E; x1, x2) between the centre-of-mass energy and the
/// threshold, located by a uniform scan, bisection, and a filter that drops
/// sign changes where G itself vanishes.
std::vector<double> green_pole_scan(const morse::MorseSolution& sol, double x1, double x2, int n_scan = 4000);

/// Union of green_pole_scan over two point pairs near the well minimum. A
/// pole whose residue psi_n(x1) psi_n(x2) vanishes (a node at a sample point)
/// is invisible to a single pair.
std::vector<double> green_poles(const morse::MorseSolution& sol);

std::vector<Check> verify_morse(const SystemParams& p, unsigned seed);

struct PendulumSetup {
  double m1 = 3.0;
  double m2 = 1.0;
  double l = 1.0;
  double g = 1.0;
  double hbar = 1.0;
};

std::vector<Check> verify_pendulum(const PendulumSetup& setup, unsigned seed);

}  // namespace kincouple::verify
