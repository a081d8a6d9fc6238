#pragma once

#include "conegl/geometry.hpp"

namespace conegl {

// Polar discretization of the unrolled sector: n_r uniformly spaced radii in
// [r_min, r_max] and n_theta uniformly spaced angles in [0, alpha). The node
// at theta = alpha is never stored; it is identified with theta = 0 through
// the seam jump factor e^{i alpha}. r_max is 1 except for the sector core
// problems, which live on [r_min_frac * eta, eta].
class SectorGrid {
 public:
  SectorGrid(const ConeParams& cone, int n_r, int n_theta, double r_min,
             double r_max = 1.0);

  const ConeParams& cone() const { return cone_; }
  int n_r() const { return n_r_; }
  int n_theta() const { return n_theta_; }
  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }
  double dr() const { return dr_; }
  double dtheta() const { return dtheta_; }

  double radius(int i) const { return r_min_ + i * dr_; }
  double angle(int k) const { return k * dtheta_; }

  // Trapezoid weight in the radial direction; the angular direction is
  // periodic and carries full weights.
  double radial_weight(int i) const {
    return (i == 0 || i == n_r_ - 1) ? 0.5 : 1.0;
  }

  int size() const { return n_r_ * n_theta_; }
  int index(int i, int k) const { return i * n_theta_ + k; }

  bool operator==(const SectorGrid& o) const {
    return cone_.alpha == o.cone_.alpha && n_r_ == o.n_r_ &&
           n_theta_ == o.n_theta_ && r_min_ == o.r_min_ && r_max_ == o.r_max_;
  }

 private:
  ConeParams cone_;
  int n_r_;
  int n_theta_;
  double r_min_;
  double r_max_;
  double dr_;
  double dtheta_;
};

}  // namespace conegl
