#include "kincouple/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "kincouple/errors.hpp"

namespace kincouple::specfun {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = std::numbers::pi;
constexpr double kMaxArg = 700.0;
constexpr int kSeriesCap = 20000;

bool is_nonpositive_integer(cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

bool is_integer(cplx z) { return z.imag() == 0.0 && z.real() == std::round(z.real()); }

double distance_to_integer(cplx z) { return std::abs(z - std::round(z.real())); }

// sin(pi x) with exact zeros at the integers.
double sinpi(double x) {
  const double n = std::round(x);
  const double s = std::sin(kPi * (x - n));
  return std::fmod(std::abs(n), 2.0) == 1.0 ? -s : s;
}

// Stirling series, valid for Re(w) >= 15.
cplx log_gamma_stirling(cplx w) {
  // B_{2k} / (2k (2k-1)), k = 1..8
  static constexpr std::array<double, 8> kCoeff = {
      1.0 / 12.0,        -1.0 / 360.0,        1.0 / 1260.0, -1.0 / 1680.0,
      1.0 / 1188.0,      -691.0 / 360360.0,   1.0 / 156.0,  -3617.0 / 122400.0};
  const cplx inv = 1.0 / w;
  const cplx inv2 = inv * inv;
  cplx series = 0.0;
  cplx power = inv;
  for (double c : kCoeff) {
    series += c * power;
    power *= inv2;
  }
  return (w - 0.5) * std::log(w) - w + 0.5 * std::log(2.0 * kPi) + series;
}

// 1F1 by direct summation. Converges for every finite z; callers limit |z|.
cplx kummer_series(cplx a, cplx b, double z) {
  cplx sum = 1.0;
  cplx term = 1.0;
  for (int k = 0; k < kSeriesCap; ++k) {
    term *= (a + double(k)) / (b + double(k)) * (z / double(k + 1));
    sum += term;
    if (term == 0.0) return sum;
    const double next_ratio =
        std::abs((a + double(k + 1)) / (b + double(k + 1))) * std::abs(z) / double(k + 2);
    if (next_ratio < 0.9 && std::abs(term) <= kEps * std::abs(sum)) return sum;
  }
  throw NoConvergence("kummer_m: power series did not converge within the iteration cap");
}

// Leading (exponentially dominant) large-z expansion of 1F1 for z > 0. Returns
// nothing when the recessive z^-a contribution is not negligible or the
// asymptotic series stalls before reaching double precision.
std::optional<cplx> kummer_asymptotic(cplx a, cplx b, double z) {
  if (is_nonpositive_integer(a)) return std::nullopt;  // terminating series is exact
  const double lz = std::log(z);
  if (!is_nonpositive_integer(b - a)) {
    const double recessive = log_gamma(a).real() - log_gamma(b - a).real() - z +
                             (b - 2.0 * a).real() * lz;
    if (recessive > std::log(1e-17)) return std::nullopt;
  }
  cplx sum = 1.0;
  cplx term = 1.0;
  double last = 1.0;
  bool converged = false;
  for (int k = 0; k < 200; ++k) {
    term *= (b - a + double(k)) * (1.0 - a + double(k)) / (double(k + 1) * z);
    const double mag = std::abs(term);
    if (mag > last) return std::nullopt;
    sum += term;
    last = mag;
    if (mag <= kEps * std::abs(sum)) {
      converged = true;
      break;
    }
  }
  if (!converged) return std::nullopt;
  const cplx logpref = log_gamma(b) - log_gamma(a) + z + (a - b) * lz;
  return std::exp(logpref) * sum;
}

// U(a, b, z) ~ z^-a sum (a)_k (a-b+1)_k / k! (-z)^-k, accepted only if the
// truncated series reaches double precision before its terms start to grow.
std::optional<cplx> tricomi_asymptotic(cplx a, cplx b, double z) {
  cplx sum = 1.0;
  cplx term = 1.0;
  double last = 1.0;
  for (int k = 0; k < 400; ++k) {
    term *= (a + double(k)) * (a - b + 1.0 + double(k)) / (double(k + 1) * -z);
    if (term == 0.0) return std::exp(-a * std::log(z)) * sum;
    const double mag = std::abs(term);
    if (mag > last) return std::nullopt;
    sum += term;
    last = mag;
    if (mag <= 0.5 * kEps * std::abs(sum)) return std::exp(-a * std::log(z)) * sum;
  }
  return std::nullopt;
}

// Two-M representation; b must be away from the integers. `rel_error` is the
// rounding estimate eps * (|t1| + |t2|) / |t1 + t2|, which captures the
// cancellation between the two terms.
cplx tricomi_two_m(cplx a, cplx b, double z, double& rel_error) {
  const cplx first = std::exp(log_gamma(1.0 - b)) * rgamma(a - b + 1.0) * kummer_m(a, b, z);
  const cplx second = std::exp(log_gamma(b - 1.0) + (1.0 - b) * std::log(z)) * rgamma(a) *
                      kummer_m(a - b + 1.0, 2.0 - b, z);
  const cplx sum = first + second;
  rel_error = 4.0 * kEps * (std::abs(first) + std::abs(second)) / std::abs(sum);
  if (!std::isfinite(rel_error)) rel_error = std::numeric_limits<double>::infinity();
  return sum;
}

// Integral over s of exp(a s - z e^s + (b - a - 1) log(1 + e^s)), i.e. the
// Laplace representation Gamma(a) U(a,b,z) after t = e^s. Needs Re(a) > 0.
// Returns the integral scaled by exp(-shift); shift is written out.
cplx laplace_integral(cplx a, cplx b, double z, double& shift) {
  const cplx c = b - a - 1.0;
  auto log1pexp = [](double s) { return s > 35.0 ? s + std::exp(-s) : std::log1p(std::exp(s)); };
  auto exponent = [&](double s) { return a * s - z * std::exp(s) + c * log1pexp(s); };

  // Coarse scan to locate the bulk of the integrand.
  const double step = 0.5;
  double lo = -60.0;
  double hi = std::log((std::abs(a) + std::abs(b) + 60.0) / z) + 2.0;
  double gmax = -std::numeric_limits<double>::infinity();
  for (double s = lo; s <= hi; s += step) gmax = std::max(gmax, exponent(s).real());
  constexpr double kDrop = 42.0;  // e^-42 ~ 6e-19 relative to the peak
  while (exponent(lo).real() > gmax - kDrop) lo -= 20.0;
  while (exponent(hi).real() > gmax - kDrop) hi += 1.0;
  while (lo + step < hi && exponent(lo + step).real() < gmax - kDrop) lo += step;
  while (hi - step > lo && exponent(hi - step).real() < gmax - kDrop) hi -= step;

  shift = gmax;
  auto f = [&](double s) { return std::exp(exponent(s) - gmax); };

  double h = 0.5;
  const int n0 = static_cast<int>(std::ceil((hi - lo) / h));
  h = (hi - lo) / n0;
  cplx sum = 0.5 * (f(lo) + f(hi));
  double abs_sum = std::abs(sum);
  for (int j = 1; j < n0; ++j) {
    const cplx v = f(lo + j * h);
    sum += v;
    abs_sum += std::abs(v);
  }
  cplx estimate = h * sum;
  int n = n0;
  for (int level = 0; level < 10; ++level) {
    cplx mid = 0.0;
    for (int j = 0; j < n; ++j) {
      const cplx v = f(lo + (j + 0.5) * h);
      mid += v;
      abs_sum += std::abs(v);
    }
    sum += mid;
    n *= 2;
    h *= 0.5;
    const cplx refined = h * sum;
    const double diff = std::abs(refined - estimate);
    estimate = refined;
    // Trapezoidal convergence here is geometric, so a small change between
    // levels bounds the error of the refined value by far less.
    if (level >= 1 && diff <= 1e-12 * h * abs_sum) return estimate;
  }
  throw NoConvergence("tricomi_u: Laplace integral did not converge");
}

cplx tricomi_laplace(cplx a, cplx b, double z) {
  const int m = a.real() >= 1.0 ? 0 : static_cast<int>(std::ceil(1.0 - a.real()));
  const cplx a0 = a + double(m);
  double shift0 = 0.0;
  const cplx i0 = laplace_integral(a0, b, z, shift0);
  const cplx u0 = i0 * std::exp(shift0 - log_gamma(a0));
  if (m == 0) return u0;
  double shift1 = 0.0;
  const cplx i1 = laplace_integral(a0 + 1.0, b, z, shift1);
  const cplx u1 = i1 * std::exp(shift1 - log_gamma(a0 + 1.0));
  // U(c-1) = (2c - b + z) U(c) - c (c - b + 1) U(c+1); U is minimal as
  // a -> +inf, so running the recurrence towards smaller a is stable.
  cplx up = u1;
  cplx cur = u0;
  cplx c = a0;
  for (int i = 0; i < m; ++i) {
    const cplx prev = (2.0 * c - b + z) * cur - c * (c - b + 1.0) * up;
    up = cur;
    cur = prev;
    c -= 1.0;
  }
  return cur;
}

void require_positive_z(double z, const char* who) {
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw InvalidParameters(std::string(who) + ": argument z must be positive and finite");
  }
}

}  // namespace

cplx log_gamma(cplx z) {
  if (is_nonpositive_integer(z)) {
    throw PoleError("log_gamma: pole at non-positive integer " + std::to_string(z.real()));
  }
  cplx w = z;
  cplx shifted = 0.0;
  while (w.real() < 15.0) {
    shifted += std::log(w);
    w += 1.0;
  }
  return log_gamma_stirling(w) - shifted;
}

double rgamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) return 0.0;
  if (x < 0.5) {
    // Reflection keeps the zeros exact: 1/Gamma(x) = sin(pi x) Gamma(1-x) / pi.
    const double g = std::tgamma(1.0 - x);
    if (!std::isfinite(g)) return sinpi(x) * std::exp(std::lgamma(1.0 - x)) / kPi;
    return sinpi(x) * g / kPi;
  }
  if (x > 170.0) return std::exp(-std::lgamma(x));
  return 1.0 / std::tgamma(x);
}

cplx rgamma(cplx z) {
  if (z.imag() == 0.0) return rgamma(z.real());
  return std::exp(-log_gamma(z));
}

cplx kummer_m(cplx a, cplx b, double z) {
  if (is_nonpositive_integer(b)) throw PoleError("kummer_m: b is a non-positive integer");
  if (!std::isfinite(z)) throw InvalidParameters("kummer_m: z must be finite");
  if (std::abs(z) > kMaxArg) throw OverflowError("kummer_m: |z| > 700 is outside the supported range");
  if (z == 0.0) return 1.0;
  if (z < 0.0) return std::exp(z) * kummer_m(b - a, b, -z);
  if (z > 30.0) {
    if (auto v = kummer_asymptotic(a, b, z)) {
      if (!std::isfinite(std::abs(*v))) throw OverflowError("kummer_m: result overflows");
      return *v;
    }
  }
  const cplx v = kummer_series(a, b, z);
  if (!std::isfinite(std::abs(v))) throw OverflowError("kummer_m: result overflows");
  return v;
}

cplx tricomi_u(cplx a, cplx b, double z) {
  require_positive_z(z, "tricomi_u");
  if (z > kMaxArg) throw OverflowError("tricomi_u: z > 700 is outside the supported range");
  if (b.real() < 1.0) {
    // Kummer's transformation moves b into Re(b) >= 1.
    return std::exp((1.0 - b) * std::log(z)) * tricomi_u(a - b + 1.0, 2.0 - b, z);
  }
  if (z >= 20.0) {
    if (auto v = tricomi_asymptotic(a, b, z)) return *v;
  }
  if (z <= 12.0) {
    double err = 0.0;
    if (is_integer(b)) {
      constexpr double kDelta = 1e-6;
      double err_lo = 0.0;
      const cplx hi = tricomi_two_m(a, b + kDelta, z, err);
      const cplx lo = tricomi_two_m(a, b - kDelta, z, err_lo);
      if (std::max(err, err_lo) <= 1e-11) return 0.5 * (hi + lo);
    } else if (distance_to_integer(b) > 1e-3) {
      const cplx v = tricomi_two_m(a, b, z, err);
      if (err <= 1e-12) return v;
    }
  }
  return tricomi_laplace(a, b, z);
}

cplx whittaker_m(double kap, cplx mu, double z) {
  require_positive_z(z, "whittaker_m");
  const cplx b = 1.0 + 2.0 * mu;
  if (is_nonpositive_integer(b)) throw PoleError("whittaker_m: 2 mu is a negative integer");
  return std::exp(-0.5 * z + (mu + 0.5) * std::log(z)) * kummer_m(mu - kap + 0.5, b, z);
}

double whittaker_m(double kap, double mu, double z) { return whittaker_m(kap, cplx(mu, 0.0), z).real(); }

cplx whittaker_w(double kap, cplx mu, double z) {
  require_positive_z(z, "whittaker_w");
  if (z > kMaxArg) throw OverflowError("whittaker_w: z > 700 is outside the supported range");
  return std::exp(-0.5 * z + (mu + 0.5) * std::log(z)) * tricomi_u(mu - kap + 0.5, 1.0 + 2.0 * mu, z);
}

double whittaker_w(double kap, double mu, double z) { return whittaker_w(kap, cplx(mu, 0.0), z).real(); }

double laguerre(int n, double alpha, double x) {
  if (n < 0) throw InvalidParameters("laguerre: n must be >= 0");
  if (!(alpha > -1.0)) throw InvalidParameters("laguerre: alpha must be > -1");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 + alpha - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double hermite(int n, double x) {
  if (n < 0) throw InvalidParameters("hermite: n must be >= 0");
  if (n > kHermiteMaxDegree) throw CapExceeded("hermite: degree exceeds the cap of 512");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * x * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

std::vector<double> hermite_functions(int n_max, double x) {
  if (n_max < 0) throw InvalidParameters("hermite_functions: n_max must be >= 0");
  if (n_max > kHermiteMaxDegree) throw CapExceeded("hermite_functions: degree above " + std::to_string(kHermiteMaxDegree));
  std::vector<double> h(static_cast<std::size_t>(n_max) + 1);
  h[0] = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
  if (n_max >= 1) h[1] = std::sqrt(2.0) * x * h[0];
  for (int k = 1; k < n_max; ++k) {
    h[k + 1] = std::sqrt(2.0 / (k + 1)) * x * h[k] - std::sqrt(double(k) / (k + 1)) * h[k - 1];
  }
  return h;
}

}  // namespace kincouple::specfun
