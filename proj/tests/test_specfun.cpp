#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "kincouple/errors.hpp"
#include "kincouple/oracles.hpp"
#include "kincouple/specfun.hpp"

using namespace kincouple;
using specfun::cplx;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

// Five-point derivative.
template <class F>
double deriv(F f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

}  // namespace

TEST_CASE("log_gamma special values") {
  CHECK(std::abs(specfun::log_gamma(1.0)) < 1e-15);
  CHECK(std::abs(specfun::log_gamma(2.0)) < 1e-15);
  CHECK(specfun::log_gamma(0.5).real() == doctest::Approx(0.5723649429247001).epsilon(1e-14));
  CHECK(specfun::log_gamma(0.5).real() == doctest::Approx(0.5 * std::log(kPi)).epsilon(1e-14));
  const double mod2 = std::exp(2.0 * specfun::log_gamma(cplx(0, 1)).real());
  CHECK(mod2 == doctest::Approx(kPi / std::sinh(kPi)).epsilon(1e-13));
  CHECK(rel(specfun::log_gamma(cplx(3, 4)), cplx(-1.7566267846037841, 4.7426644380346579)) < 1e-13);
  CHECK(rel(specfun::log_gamma(cplx(-2.5, 0.1)), cplx(-0.1031492440428192, -9.3144442683598381)) < 1e-13);
}

TEST_CASE("log_gamma matches tgamma on the real line") {
  for (double x = 0.05; x < 50.0; x *= 1.37) {
    CHECK(std::exp(specfun::log_gamma(x).real()) == doctest::Approx(std::tgamma(x)).epsilon(1e-12));
  }
}

TEST_CASE("log_gamma poles") {
  CHECK_THROWS_AS(specfun::log_gamma(0.0), PoleError);
  CHECK_THROWS_AS(specfun::log_gamma(-3.0), PoleError);
  CHECK_NOTHROW(specfun::log_gamma(cplx(-3.0, 1e-3)));
}

TEST_CASE("property: log_gamma recurrence") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> re(0.1, 20.0), im(-20.0, 20.0);
  for (int i = 0; i < 300; ++i) {
    const cplx z(re(rng), im(rng));
    cplx diff = specfun::log_gamma(z + 1.0) - specfun::log_gamma(z) - std::log(z);
    // Equality modulo 2 pi i on the principal branch.
    diff.imag(std::remainder(diff.imag(), 2 * kPi));
    CHECK(std::abs(diff) < 1e-12 * std::max(1.0, std::abs(specfun::log_gamma(z))));
  }
}

TEST_CASE("reciprocal gamma is zero at the poles") {
  CHECK(specfun::rgamma(0.0) == 0.0);
  CHECK(specfun::rgamma(-4.0) == 0.0);
  CHECK(specfun::rgamma(5.0) == doctest::Approx(1.0 / 24.0).epsilon(1e-14));
  CHECK(specfun::rgamma(-0.5) == doctest::Approx(-1.0 / (2.0 * std::sqrt(kPi))).epsilon(1e-14));
}

TEST_CASE("kummer_m examples") {
  CHECK(specfun::kummer_m(2.3, 1.7, 0.0) == cplx(1.0, 0.0));
  for (double z : {-30.0, -3.0, 0.5, 10.0, 45.0}) {
    CHECK(rel(specfun::kummer_m(1.0, 1.0, z), cplx(std::exp(z), 0.0)) < 1e-13);
  }
  CHECK(specfun::kummer_m(2.0, 3.0, 1.0).real() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(rel(specfun::kummer_m(-3.5, 2.2, 40.0).real(), 1522121072.0291389) < 1e-10);
  CHECK(rel(specfun::kummer_m(1.5, 2.5, -50.0).real(), 0.0037599424119465008) < 1e-10);
  CHECK(rel(specfun::kummer_m(0.7, 1.9, 100.0).real(), 7.9580712735330165e+40) < 1e-10);
}

TEST_CASE("kummer_m error paths") {
  CHECK_THROWS_AS(specfun::kummer_m(1.0, -2.0, 1.0), PoleError);
  CHECK_THROWS_AS(specfun::kummer_m(1.0, 0.0, 1.0), PoleError);
  CHECK_THROWS_AS(specfun::kummer_m(1.0, 1.5, 800.0), OverflowError);
}

TEST_CASE("property: Kummer contiguous relation") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ua(-5.0, 5.0), ub(0.5, 6.0), uz(-20.0, 40.0);
  for (int i = 0; i < 400; ++i) {
    const double a = ua(rng), b = ub(rng), z = uz(rng);
    const double m0 = specfun::kummer_m(a - 1, b, z).real();
    const double m1 = specfun::kummer_m(a, b, z).real();
    const double m2 = specfun::kummer_m(a + 1, b, z).real();
    const double res = (b - a) * m0 + (2 * a - b + z) * m1 - a * m2;
    const double scale = std::abs((b - a) * m0) + std::abs((2 * a - b + z) * m1) + std::abs(a * m2);
    CHECK(std::abs(res) <= 1e-9 * scale);
  }
}

TEST_CASE("tricomi_u examples") {
  for (double a : {0.3, 2.7}) {
    for (double z : {0.2, 1.0, 7.5, 30.0}) {
      CHECK(rel(specfun::tricomi_u(a, a + 1, z).real(), std::pow(z, -a)) < 1e-13);
    }
  }
  // Integer b goes through the perturbed-b / integral paths.
  for (double z : {0.2, 1.0, 7.5, 30.0}) {
    CHECK(rel(specfun::tricomi_u(1.0, 2.0, z).real(), 1.0 / z) < 1e-11);
  }
  CHECK(rel(specfun::tricomi_u(1.0, 1.0, 1.0).real(), 0.5963473623231941) < 1e-12);
  CHECK(rel(specfun::tricomi_u(4.5, 1.3, 5.0).real(), 7.6710211041993558e-5) < 1e-10);
  CHECK(rel(specfun::tricomi_u(0.3, 2.0, 25.0).real(), 0.38390490736011521) < 1e-10);
}

TEST_CASE("tricomi_u at integer b holds its empirical accuracy") {
  CHECK(rel(specfun::tricomi_u(4.5, 1.0, 5.0).real(), 6.7031715651394466e-5) < 1e-9);
}

TEST_CASE("U(1,1,1) against a quadrature of the exponential integral") {
  // e E1(1) = e * int_1^inf e^{-t}/t dt = int_0^inf e^{-s}/(1+s) ds
  const double e1 = oracles::quadrature([](double s) { return std::exp(-s) / (1 + s); }, 0.0, 60.0, 1e-13);
  CHECK(rel(specfun::tricomi_u(1.0, 1.0, 1.0).real(), e1) < 1e-11);
}

TEST_CASE("tricomi_u leading asymptotics") {
  for (double a : {0.5, 1.5}) {
    const double z = 600.0;
    CHECK(specfun::tricomi_u(a, 0.7, z).real() * std::pow(z, a) == doctest::Approx(1.0).epsilon(1e-2));
  }
  CHECK_THROWS_AS(specfun::tricomi_u(1.0, 1.5, -1.0), InvalidParameters);
}

TEST_CASE("whittaker_m examples") {
  for (double z : {0.3, 1.0, 4.0}) {
    CHECK(specfun::whittaker_m(0.0, 0.5, z) == doctest::Approx(2.0 * std::sinh(z / 2)).epsilon(1e-13));
  }
  CHECK(specfun::whittaker_m(1.0, 0.5, 2.0) == doctest::Approx(0.7357588823428846).epsilon(1e-13));
  CHECK(specfun::whittaker_m(1.0, 0.5, 2.0) == doctest::Approx(2.0 / std::exp(1.0)).epsilon(1e-13));
  const double z = 1e-6;
  CHECK(specfun::whittaker_m(2.3, 0.7, z) / std::pow(z, 1.2) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("whittaker_w examples") {
  for (double z : {1.0, 2.0, 5.0}) {
    CHECK(specfun::whittaker_w(0.0, 0.5, z) == doctest::Approx(std::exp(-z / 2)).epsilon(1e-11));
  }
  CHECK(specfun::whittaker_w(5.0, 0.3, 12.0) == doctest::Approx(19.791046211637163).epsilon(1e-11));
  const double z = 600.0;
  CHECK(specfun::whittaker_w(1.2, 0.4, z) * std::exp(z / 2) * std::pow(z, -1.2) == doctest::Approx(1.0).epsilon(1e-2));
  CHECK_THROWS_AS(specfun::whittaker_w(1.0, 0.3, 800.0), OverflowError);
}

TEST_CASE("W_{1,0}(1) against an integral representation") {
  CHECK(specfun::whittaker_w(1.0, 0.0, 1.0) == doctest::Approx(0.46727341283302066).epsilon(1e-12));
  // U(a, 1, 1) = (1/Gamma(a)) int_0^inf e^{-t} t^{a-1} (1+t)^{-a} dt for a > 0,
  // then one downward step U(a-1) = (2a - b + z) U(a) - a (a - b + 1) U(a+1).
  auto u_integral = [](double a) {
    // t = s^2 removes the endpoint singularity.
    auto f = [a](double s) {
      const double t = s * s;
      return 2.0 * s * std::exp(-t) * std::pow(t, a - 1) * std::pow(1 + t, -a);
    };
    return oracles::quadrature(f, 0.0, 8.0, 1e-13) / std::tgamma(a);
  };
  const double a = 0.5;
  const double u_half = u_integral(a);
  const double u_3half = u_integral(a + 1);
  const double u_m_half = (2 * a - 1 + 1) * u_half - a * (a - 1 + 1) * u_3half;
  const double w = std::exp(-0.5) * u_m_half;
  CHECK(specfun::whittaker_w(1.0, 0.0, 1.0) == doctest::Approx(w).epsilon(1e-10));
}

TEST_CASE("property: Whittaker Wronskian") {
  for (auto [kap, mu] : {std::pair{1.3, 0.4}, std::pair{0.2, 1.1}, std::pair{3.7, 0.25}}) {
    const double expected = -std::tgamma(1 + 2 * mu) / std::tgamma(mu - kap + 0.5);
    for (double z : {0.5, 1.0, 5.0}) {
      auto M = [&](double x) { return specfun::whittaker_m(kap, mu, x); };
      auto W = [&](double x) { return specfun::whittaker_w(kap, mu, x); };
      const double h = 1e-3 * z;
      const double wr = M(z) * deriv(W, z, h) - deriv(M, z, h) * W(z);
      CHECK(rel(wr, expected) < 1e-7);
    }
  }
}

TEST_CASE("imaginary-index W is real") {
  const cplx w = specfun::whittaker_w(5.0, cplx(0.0, 0.8), 3.0);
  CHECK(std::abs(w.imag()) < 1e-10 * std::abs(w));
  CHECK(w.real() == doctest::Approx(7.8902581600669015).epsilon(1e-11));
  for (double k : {0.1, 1.0, 3.0}) {
    for (double z : {0.01, 0.5, 8.0, 40.0}) {
      const cplx v = specfun::whittaker_w(4.3, cplx(0.0, k), z);
      CHECK(std::abs(v.imag()) < 1e-10 * std::abs(v));
    }
  }
}

TEST_CASE("laguerre examples") {
  CHECK(specfun::laguerre(0, 2.5, 3.1) == 1.0);
  for (double a : {-0.5, 0.0, 2.0}) {
    for (double x : {0.0, 1.5, 7.0}) {
      CHECK(specfun::laguerre(1, a, x) == doctest::Approx(1 + a - x).epsilon(1e-15));
    }
  }
  CHECK(specfun::laguerre(2, 0.0, 0.0) == 1.0);
  // L_n^{(a)}(0) = binomial(n + a, n)
  CHECK(specfun::laguerre(4, 1.5, 0.0) ==
        doctest::Approx(std::tgamma(4 + 1.5 + 1) / (std::tgamma(1.5 + 1) * 24.0)).epsilon(1e-13));
}

TEST_CASE("hermite examples and cap") {
  CHECK(specfun::hermite(0, 0.7) == 1.0);
  CHECK(specfun::hermite(1, 0.7) == doctest::Approx(1.4));
  CHECK(specfun::hermite(3, 1.0) == doctest::Approx(-4.0).epsilon(1e-15));
  CHECK_NOTHROW(specfun::hermite(specfun::kHermiteMaxDegree, 0.1));
  CHECK_THROWS_AS(specfun::hermite(specfun::kHermiteMaxDegree + 1, 0.1), CapExceeded);
  CHECK_THROWS_AS(specfun::hermite_functions(specfun::kHermiteMaxDegree + 1, 0.1), CapExceeded);
}

TEST_CASE("hermite functions agree with the polynomials") {
  for (double x : {-2.0, 0.3, 1.7}) {
    const auto h = specfun::hermite_functions(8, x);
    for (int n = 0; n <= 8; ++n) {
      const double direct = specfun::hermite(n, x) * std::exp(-x * x / 2) /
                            std::sqrt(std::pow(2.0, n) * std::tgamma(n + 1.0) * std::sqrt(kPi));
      CHECK(h[n] == doctest::Approx(direct).epsilon(1e-13));
    }
  }
}

TEST_CASE("property: Laguerre orthogonality") {
  for (double a : {0.0, 0.5, 3.0}) {
    for (int n = 0; n <= 10; ++n) {
      for (int m = n; m <= 10; ++m) {
        auto f = [&](double x) {
          return std::pow(x, a) * std::exp(-x) * specfun::laguerre(n, a, x) * specfun::laguerre(m, a, x);
        };
        const double ip = oracles::quadrature(f, 0.0, 120.0, 1e-12);
        const double nn = std::tgamma(n + a + 1) / std::tgamma(n + 1.0);
        const double nm = std::tgamma(m + a + 1) / std::tgamma(m + 1.0);
        const double normed = ip / std::sqrt(nn * nm);
        CHECK(std::abs(normed - (n == m ? 1.0 : 0.0)) < 1e-8);
      }
    }
  }
}

TEST_CASE("property: Hermite orthogonality") {
  for (int n = 0; n <= 10; ++n) {
    for (int m = n; m <= 10; ++m) {
      auto f = [&](double x) {
        const auto h = specfun::hermite_functions(m, x);
        return h[n] * h[m];
      };
      const double ip = oracles::quadrature(f, -14.0, 14.0, 1e-12);
      CHECK(std::abs(ip - (n == m ? 1.0 : 0.0)) < 1e-8);
    }
  }
}
