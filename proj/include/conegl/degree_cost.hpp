#pragma once

#include <vector>

#include "conegl/geometry.hpp"

namespace conegl {

// Optimal split of a total degree d into a tip degree d0 (quadratic cost
// (2pi/alpha)(d0 - 1 + alpha/2pi)^2) and off-tip unit vortices (linear
// cost |d1|).
struct DegreeSplit {
  int d0 = 0;
  int d1 = 0;
  double cost = 0.0;
};

// Exhaustive minimization over d0 in [-bound, bound]; ties are broken toward
// the smallest |d0|. bound must be at least |d| + ceil(2pi/alpha) + 2.
DegreeSplit m_bruteforce(int d, const ConeParams& cone, int bound);
DegreeSplit m_bruteforce(int d, const ConeParams& cone);  // bound = |d| + 10

// Two-branch closed form:
//   |d| + (alpha - 2pi)^2 / (2pi alpha)   if d <= 0 and alpha > 2pi/3,
//   |d - 1| + alpha / 2pi                 otherwise.
double m_closed(int d, const ConeParams& cone);

// m(dbar) <= m(split[0]) + sum_{j>=1} |split[j]| for any integer split of
// dbar. Returns the truth of that inequality (it always holds).
bool additivity_check(int dbar, const std::vector<int>& split,
                      const ConeParams& cone);

}  // namespace conegl
