#include "conegl/geometry.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "conegl/errors.hpp"

namespace conegl {

namespace {
constexpr double kModulusTol = 1e-12;
}

ConeParams::ConeParams(double a) : alpha(a) {
  if (!(a > 0.0) || !(a < kTwoPi)) {
    throw std::invalid_argument("ConeParams: alpha must lie strictly in (0, 2*pi)");
  }
}

ConePoint make_cone_point(double r, double theta, const ConeParams& cone) {
  if (!(r >= 0.0) || !(r <= 1.0 + kModulusTol)) {
    throw std::invalid_argument("ConePoint: r must lie in [0, 1]");
  }
  if (r > 1.0) r = 1.0;
  if (r == 0.0) return ConePoint{0.0, 0.0};
  double t = std::fmod(theta, cone.alpha);
  if (t < 0.0) t += cone.alpha;
  if (t >= cone.alpha) t = 0.0;
  return ConePoint{r, t};
}

double angular_gap(double theta_a, double theta_b, const ConeParams& cone) {
  double d = std::fabs(theta_a - theta_b);
  d = std::fmod(d, cone.alpha);
  return std::min(d, cone.alpha - d);
}

double geodesic_distance(const ConePoint& p, const ConePoint& q,
                         const ConeParams& cone) {
  const double gap = angular_gap(p.theta, q.theta, cone);
  // Minimal gap <= alpha/2 < pi, so the straight unrolled segment is the
  // geodesic and never passes through the tip.
  assert(gap <= 0.5 * cone.alpha + 1e-12);
  const double d2 =
      p.r * p.r + q.r * q.r - 2.0 * p.r * q.r * std::cos(gap);
  return std::sqrt(std::max(0.0, d2));
}

cplx disc_to_sector(cplx z, const ConeParams& cone) {
  const double m = std::abs(z);
  if (m > 1.0 + kModulusTol) {
    throw std::domain_error("disc_to_sector: |z| > 1");
  }
  if (m == 0.0) return cplx{0.0, 0.0};
  double a = std::arg(z);
  if (a < 0.0) a += kTwoPi;
  const double b = cone.beta();
  return std::polar(std::pow(std::min(m, 1.0), b), b * a);
}

cplx sector_to_disc(cplx w, const ConeParams& cone) {
  const double m = std::abs(w);
  if (m > 1.0 + kModulusTol) {
    throw std::domain_error("sector_to_disc: |w| > 1");
  }
  if (m == 0.0) return cplx{0.0, 0.0};
  double a = std::arg(w);
  if (a < 0.0) a += kTwoPi;
  if (a >= cone.alpha) {
    if (a <= cone.alpha + kModulusTol) {
      a = 0.0;  // seam representative
    } else if (a >= kTwoPi - kModulusTol) {
      a = 0.0;
    } else {
      throw std::domain_error("sector_to_disc: arg(w) outside [0, alpha)");
    }
  }
  const double b = cone.beta();
  return std::polar(std::pow(std::min(m, 1.0), 1.0 / b), a / b);
}

double conformal_derivative_modulus(cplx z, const ConeParams& cone) {
  const double m = std::abs(z);
  if (m == 0.0) {
    throw SingularAtOrigin("conformal_derivative_modulus: P' is singular at z = 0");
  }
  const double b = cone.beta();
  return b * std::pow(m, b - 1.0);
}

}  // namespace conegl
