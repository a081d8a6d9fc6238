#pragma once

#include <utility>
#include <vector>

#include "conegl/balls.hpp"
#include "conegl/field.hpp"

namespace conegl {

struct DetectedVortex {
  ConePoint position;
  int degree = 0;
};

struct VortexSet {
  int tip_degree = 0;
  std::vector<DetectedVortex> vortices;
  int dbar = 0;
};

struct DetectOptions {
  double core_threshold = 0.5;   // |u| below this marks a core node
  double clean_threshold = 0.7;  // loops need |u| above this everywhere
  double merge_factor = 4.0;     // components within merge_factor*eps coalesce
  int max_loop_expand = 40;      // enclosing-loop growth limit, in cells
  double tip_band_cap = 0.4;     // ceiling on the 3 sqrt(eps) tip band
};

// Finds connected components of {|u| < core_threshold}, assigns each off-tip
// component a position ((1-|u|^2)-weighted centroid) and a degree (winding of
// the smallest clean enclosing grid loop), and measures the tip degree on the
// smallest all-clean circle. Components with centroid
// r <= min(3 sqrt(eps), tip_band_cap) count as part of the tip core (the cap
// keeps desk-scale epsilon from swallowing genuine off-tip vortices). Throws
// InconsistentDegrees if tip + off-tip degrees fail to add up to the boundary
// degree, UnresolvedCore when no clean enclosing loop exists.
VortexSet detect_vortices(const TangentField& field, double epsilon,
                          const DetectOptions& opts = {});

struct ExpansionFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
};

// Ordinary least squares of total energy against log(1/eps). Needs >= 3 runs;
// throws DegenerateDesign when the epsilons do not vary.
ExpansionFit fit_expansion(const std::vector<std::pair<double, double>>& runs);

// Admissible ball family enclosing the bad set {|u| < core_threshold} of a
// converged field, with degrees attached from enclosing-loop windings; input
// for the growth lower-bound ledger.
BallFamily bad_set_family(const TangentField& field, double epsilon,
                          const DetectOptions& opts = {});

}  // namespace conegl
