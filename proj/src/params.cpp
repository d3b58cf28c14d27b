#include "kincouple/params.hpp"

#include <cmath>
#include <string>

#include "kincouple/errors.hpp"

namespace kincouple {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw InvalidParameters(std::string("invalid parameters: ") + what);
}

}  // namespace

void validate(const SystemParams& p) {
  require(std::isfinite(p.m1) && std::isfinite(p.m2) && std::isfinite(p.kappa) &&
              std::isfinite(p.lambda) && std::isfinite(p.alpha) && std::isfinite(p.beta) &&
              std::isfinite(p.r0) && std::isfinite(p.hbar),
          "all parameters must be finite");
  require(p.m1 > 0.0, "m1 > 0");
  require(p.m2 > 0.0, "m2 > 0");
  require(p.lambda >= 0.0, "lambda >= 0");
  require(p.alpha > 0.0, "alpha > 0");
  require(p.beta > 0.0, "beta > 0");
  require(p.hbar > 0.0, "hbar > 0");
  // Strict at the boundary: kappa^2 == 1/(m1 m2) is rejected.
  require(p.kappa * p.kappa * p.m1 * p.m2 < 1.0, "kappa^2 < 1/(m1*m2) (positive-definite kinetic form)");
  const double mu = p.m1 * p.m2 / (p.m1 + p.m2);
  require(2.0 * mu * p.kappa < 1.0, "kappa < 1/(2*mu) (positive relative kinetic coefficient d)");
}

ReducedCoeffs reduce(const SystemParams& p) {
  validate(p);
  ReducedCoeffs c;
  c.M_total = p.m1 + p.m2;
  c.mu = p.m1 * p.m2 / c.M_total;
  c.mu1 = p.m1 / c.M_total;
  c.mu2 = 1.0 - c.mu1;
  c.a = 1.0 / (2.0 * c.M_total) + p.kappa * c.mu1 * c.mu2;
  c.d = 1.0 / (2.0 * c.mu) - p.kappa;
  c.b = 0.5 * p.kappa * (c.mu2 - c.mu1);
  c.D = c.a * c.d - c.b * c.b;
  return c;
}

ComRelativePoint to_com_relative(const PhaseSpacePoint& pt, const SystemParams& p) {
  validate(p);
  const double mu1 = p.m1 / (p.m1 + p.m2);
  const double mu2 = 1.0 - mu1;
  return {mu1 * pt.x1 + mu2 * pt.x2, pt.x1 - pt.x2 - p.r0, pt.p1 + pt.p2, mu2 * pt.p1 - mu1 * pt.p2};
}

PhaseSpacePoint from_com_relative(const ComRelativePoint& q, const SystemParams& p) {
  validate(p);
  const double mu1 = p.m1 / (p.m1 + p.m2);
  const double mu2 = 1.0 - mu1;
  const double sep = q.xr + p.r0;
  return {q.X + mu2 * sep, q.X - mu1 * sep, q.Pr + mu1 * q.P, mu2 * q.P - q.Pr};
}

double kinetic_energy(const PhaseSpacePoint& pt, const SystemParams& p) {
  return pt.p1 * pt.p1 / (2.0 * p.m1) + pt.p2 * pt.p2 / (2.0 * p.m2) + p.kappa * pt.p1 * pt.p2;
}

double kinetic_energy(const ComRelativePoint& q, const ReducedCoeffs& c) {
  return c.a * q.P * q.P + c.d * q.Pr * q.Pr + 2.0 * c.b * q.P * q.Pr;
}

}  // namespace kincouple
