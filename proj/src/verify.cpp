#include "kincouple/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "kincouple/errors.hpp"
#include "kincouple/normal_modes.hpp"
#include "kincouple/oracles.hpp"
#include "kincouple/propagator.hpp"

namespace kincouple::verify {

namespace {

Check make_check(std::string name, double error, double tol, std::string detail) {
  Check c;
  c.name = std::move(name);
  c.error = error;
  c.tolerance = tol;
  c.pass = std::isfinite(error) && error <= tol;
  c.detail = std::move(detail);
  return c;
}

oracles::Grid1D grid_for(const morse::EffectiveRelativeProblem& prob, double h) {
  oracles::Grid1D g;
  g.lo = prob.x_lo;
  g.hi = prob.x_hi;
  g.n_points = static_cast<int>(std::ceil((g.hi - g.lo) / h)) + 1;
  return g;
}

// Distance of the highest bound level below threshold, in units of beta.
double top_level_gap(const SystemParams& p) {
  const double xi = morse::build(p).xi;
  return xi - std::ceil(xi - 0.5) + 0.5;
}

SystemParams random_morse(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    SystemParams p;
    p.m1 = 0.5 + 2.0 * u(rng);
    p.m2 = 0.5 + 2.0 * u(rng);
    p.lambda = 4.0 + 40.0 * u(rng);
    p.alpha = 0.5 + 1.5 * u(rng);
    p.beta = 0.6 + 0.8 * u(rng);
    const double mu = p.m1 * p.m2 / (p.m1 + p.m2);
    const double kmax = std::min(1.0 / std::sqrt(p.m1 * p.m2), 1.0 / (2.0 * mu));
    p.kappa = (2.0 * u(rng) - 1.0) * 0.8 * kmax;
    const double s = top_level_gap(p);
    if (morse::build(p).n_bound >= 1 && s > 0.1 && s < 0.9) return p;
  }
}

oracles::Matrix random_spd(int n, std::mt19937_64& rng, double shift) {
  std::normal_distribution<double> nd;
  oracles::Matrix B(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) B(i, j) = nd(rng);
  }
  oracles::Matrix S = B * B.transpose() / n;
  S += shift * oracles::Matrix::Identity(n, n);
  return 0.5 * (S + S.transpose());
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

std::vector<double> morse_fd_energies(const SystemParams& p, int n_levels, double h) {
  const auto prob = morse::relative_problem(p);
  const auto coarse = oracles::fd_spectrum(prob.mass_eff, prob.potential, grid_for(prob, h), n_levels, prob.hbar);
  const auto fine = oracles::fd_spectrum(prob.mass_eff, prob.potential, grid_for(prob, 0.5 * h), n_levels, prob.hbar);
  std::vector<double> out(n_levels);
  for (int k = 0; k < n_levels; ++k) out[k] = oracles::richardson(coarse.energies[k], fine.energies[k]);
  return out;
}

std::vector<double> green_pole_scan(const morse::MorseSolution& sol, double x1, double x2, int n_scan) {
  const double lo = morse::com_energy(sol);
  const double hi = morse::threshold_energy(sol);
  const double span = hi - lo;
  auto f = [&](double E) { return morse::inverse_green_function(sol, E, x1, x2); };
  std::vector<double> E(n_scan + 1), v(n_scan + 1);
  for (int i = 0; i <= n_scan; ++i) {
    // Cluster points towards the threshold, where the levels crowd.
    const double t = static_cast<double>(i) / n_scan;
    E[i] = lo + span * (1.0 - (1.0 - t) * (1.0 - t)) * (1.0 - 1e-12);
    v[i] = f(E[i]);
  }
  std::vector<double> poles;
  for (int i = 0; i < n_scan; ++i) {
    if (!std::isfinite(v[i]) || !std::isfinite(v[i + 1])) continue;
    if ((v[i] < 0.0) == (v[i + 1] < 0.0)) continue;
    double a = E[i];
    double b = E[i + 1];
    double fa = v[i];
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (a + b);
      if (m <= a || m >= b) break;
      const double fm = f(m);
      if ((fm < 0.0) == (fa < 0.0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    // A zero of 1/G is small next to the bracket values; a sign change
    // through a zero of G is large.
    const double mid = f(0.5 * (a + b));
    if (std::abs(mid) < 1e-6 * std::max(std::abs(v[i]), std::abs(v[i + 1]))) poles.push_back(0.5 * (a + b));
  }
  return poles;
}

std::vector<double> green_poles(const morse::MorseSolution& sol) {
  const double x0 = morse::well_minimum(sol.params);
  const double b = sol.params.beta;
  std::vector<double> all = green_pole_scan(sol, x0, x0 + 0.3 / b);
  const auto more = green_pole_scan(sol, x0 - 0.13 / b, x0 + 0.21 / b);
  all.insert(all.end(), more.begin(), more.end());
  std::sort(all.begin(), all.end());
  std::vector<double> merged;
  for (double e : all) {
    if (merged.empty() || std::abs(e - merged.back()) > 1e-7 * std::max(1.0, std::abs(e))) merged.push_back(e);
  }
  return merged;
}

std::vector<Check> verify_morse(const SystemParams& p, unsigned seed) {
  validate(p);
  std::vector<Check> checks;
  const auto sol = morse::build(p);

  {
    double worst = 0.0;
    std::string detail = "n_bound = " + std::to_string(sol.n_bound);
    if (sol.n_bound > 0) {
      const auto fd = morse_fd_energies(p, sol.n_bound);
      for (int n = 0; n < sol.n_bound; ++n) {
        const double E = morse::bound_energy_relative(sol, n);
        worst = std::max(worst, std::abs(fd[n] - E) / std::abs(E));
      }
    }
    checks.push_back(make_check("morse energies vs FD (relative)", worst, 1e-6, detail));
  }

  {
    std::mt19937_64 rng(seed);
    int mismatches = 0;
    std::string detail;
    for (int k = 0; k < 5; ++k) {
      const SystemParams q = random_morse(rng);
      const auto s = morse::build(q);
      const auto prob = morse::relative_problem(q);
      const int count = oracles::fd_count_below(prob.mass_eff, prob.potential, grid_for(prob, 0.005), q.lambda, q.hbar);
      if (count != s.n_bound) ++mismatches;
      detail += (k ? ", " : "") + std::to_string(s.n_bound) + "/" + std::to_string(count);
    }
    checks.push_back(make_check("bound count vs FD (5 random sets)", mismatches, 0.0, "analytic/FD " + detail));
  }

  {
    double worst = 0.0;
    std::string detail;
    if (sol.n_bound > 0) {
      const auto poles = green_poles(sol);
      if (static_cast<int>(poles.size()) != sol.n_bound) {
        worst = std::numeric_limits<double>::infinity();
        detail = "found " + std::to_string(poles.size()) + " poles, expected " + std::to_string(sol.n_bound);
      } else {
        for (int n = 0; n < sol.n_bound; ++n) {
          const double E = morse::bound_energy(sol, n);
          worst = std::max(worst, std::abs(poles[n] - E) / std::max(1.0, std::abs(E)));
        }
        detail = std::to_string(poles.size()) + " poles";
      }
    } else {
      detail = "no bound states";
    }
    checks.push_back(make_check("green pole scan vs bound energies", worst, 1e-8, detail));
  }
  return checks;
}

std::vector<Check> verify_pendulum(const PendulumSetup& setup, unsigned seed) {
  std::vector<Check> checks;
  const auto sys = modes::pendulum_matrices(setup.m1, setup.m2, setup.l, setup.g);
  const auto basis = modes::generalized_modes(sys);
  std::mt19937_64 rng(seed);

  {
    double worst = 0.0;
    int cases = 0;
    auto compare = [&](const oracles::Matrix& A, const oracles::Matrix& K) {
      const auto b = modes::generalized_modes({A, K});
      const double bound = 1.05 * oracles::brute_root_bound(A, K);
      const auto roots = oracles::expand_roots(oracles::brute_modes(A, K, bound, 20000));
      ++cases;
      if (static_cast<int>(roots.size()) != b.n()) {
        worst = std::numeric_limits<double>::infinity();
        return;
      }
      for (int k = 0; k < b.n(); ++k) worst = std::max(worst, std::abs(roots[k] - b.omega2(k)));
    };
    compare(sys.A, sys.K);
    std::uniform_int_distribution<int> dim(2, 6);
    for (int k = 0; k < 5; ++k) {
      const int n = dim(rng);
      compare(random_spd(n, rng, 0.3), random_spd(n, rng, 0.1));
    }
    checks.push_back(make_check("modes vs brute_modes (absolute)", worst, 1e-9, std::to_string(cases) + " systems"));
  }

  std::uniform_real_distribution<double> u(-0.5, 0.5);
  {
    double worst = 0.0;
    bool truncated = false;
    for (int k = 0; k < 2; ++k) {
      oracles::Vector p1(2), p2(2);
      p1 << u(rng), u(rng);
      p2 << u(rng), u(rng);
      const double tau = 0.5;
      const double exact =
          propagator::coupled_kernel(basis, p1, p2, tau, setup.hbar, propagator::Regime::ImaginaryTime).amplitude.real();
      double vals[2];
      const int slices[2] = {32, 64};
      for (int q = 0; q < 2; ++q) {
        const oracles::LatticeSpec spec{slices[q], tau};
        const auto grid = oracles::lattice_auto_grid(sys.A, spec, p1, p2, setup.hbar);
        const auto r = oracles::lattice_kernel(sys.A, sys.K, spec, grid, p1, p2, setup.hbar);
        truncated = truncated || r.truncated;
        vals[q] = r.value;
      }
      worst = std::max(worst, std::abs(oracles::richardson(vals[0], vals[1]) - exact) / std::abs(exact));
    }
    if (truncated) worst = std::numeric_limits<double>::infinity();
    checks.push_back(make_check("kernel vs lattice, tau = 0.5 (relative)", worst, 1e-3,
                                truncated ? "grid truncated" : "N = 32, 64 extrapolated"));
  }

  {
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) {
      oracles::Vector p1(2), p2(2);
      p1 << u(rng), u(rng);
      p2 << u(rng), u(rng);
      const double tau = 2.0;
      const auto exact = propagator::coupled_kernel(basis, p1, p2, tau, setup.hbar, propagator::Regime::ImaginaryTime);
      const auto sum = propagator::spectral_kernel(basis, {30, propagator::Regime::ImaginaryTime}, p1, p2, tau, setup.hbar);
      worst = std::max(worst, std::abs(sum - exact.amplitude) / std::abs(exact.amplitude));
    }
    checks.push_back(make_check("spectral sum vs closed form, tau = 2 (relative)", worst, 1e-8,
                                "n_max = 30, omega2 = " + fmt(basis.omega2(0)) + ", " + fmt(basis.omega2(1))));
  }
  return checks;
}

}  // namespace kincouple::verify
