#include "conegl/grid.hpp"

#include <stdexcept>

namespace conegl {

SectorGrid::SectorGrid(const ConeParams& cone, int n_r, int n_theta,
                       double r_min, double r_max)
    : cone_(cone), n_r_(n_r), n_theta_(n_theta), r_min_(r_min), r_max_(r_max) {
  if (n_r < 16 || n_theta < 16) {
    throw std::invalid_argument("SectorGrid: n_r and n_theta must be >= 16");
  }
  if (!(r_min > 0.0) || !(r_min < r_max) || !(r_max <= 1.0)) {
    throw std::invalid_argument("SectorGrid: need 0 < r_min < r_max <= 1");
  }
  dr_ = (r_max - r_min) / (n_r - 1);
  dtheta_ = cone.alpha / n_theta;
}

}  // namespace conegl
