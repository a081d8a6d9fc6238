#pragma once

#include <complex>

namespace conegl {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// The cone of opening angle alpha, represented through its isometric
// unrolling into the planar sector of radius 1 with the straight edges
// theta = 0 and theta = alpha identified.
struct ConeParams {
  double alpha;  // opening angle of the unrolled sector, radians

  static constexpr double generator_length = 1.0;

  explicit ConeParams(double a);

  // Exponent of the conformal map P(z) = z^beta from the unit disc.
  double beta() const { return alpha / kTwoPi; }
};

// Polar coordinates on the unrolled sector. theta lives in [0, alpha) and is
// canonicalized to 0 at the tip.
struct ConePoint {
  double r = 0.0;
  double theta = 0.0;
};

ConePoint make_cone_point(double r, double theta, const ConeParams& cone);

// Minimal angular gap between two directions across the seam identification.
double angular_gap(double theta_a, double theta_b, const ConeParams& cone);

// Geodesic distance on the cone. Because alpha < 2*pi the minimal gap never
// exceeds pi, so geodesics avoid the tip and the unrolled law of cosines is
// exact.
double geodesic_distance(const ConePoint& p, const ConePoint& q,
                         const ConeParams& cone);

// Conformal map P(z) = z^(alpha/2pi) from the closed unit disc onto the
// sector, with the branch fixed by arg z in [0, 2pi) <-> arg w in [0, alpha).
cplx disc_to_sector(cplx z, const ConeParams& cone);

// Branch inverse of disc_to_sector. Rejects points with argument outside
// [0, alpha).
cplx sector_to_disc(cplx w, const ConeParams& cone);

// |P'(z)| = (alpha/2pi) |z|^(alpha/2pi - 1). Throws SingularAtOrigin at z=0.
double conformal_derivative_modulus(cplx z, const ConeParams& cone);

}  // namespace conegl
