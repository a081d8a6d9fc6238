#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "conegl/geometry.hpp"

namespace conegl {

// Closed geodesic ball on the cone with an attached degree. A center with
// r == 0 marks the tip ball.
struct Ball {
  ConePoint center;
  double radius = 0.0;
  int degree = 0;

  bool is_tip() const { return center.r == 0.0; }
};

// Admissible collection: pairwise disjoint closed balls, exactly one of them
// centered at the tip.
struct BallFamily {
  std::vector<Ball> balls;
  ConeParams cone;

  BallFamily(std::vector<Ball> b, const ConeParams& c)
      : balls(std::move(b)), cone(c) {}

  double total_radius() const;
  long total_degree() const;
  const Ball* tip_ball() const;

  // Throws std::invalid_argument if the family is not admissible.
  void validate() const;
};

// True iff the ball meets every ray from the tip: radius >= center.r, or
// 2 asin(radius / center.r) >= alpha. Tip-centered balls trivially qualify.
bool is_self_intersecting(const Ball& b, const ConeParams& cone);

// Repeatedly applies the merge cases (pairwise enclosing balls, absorption
// of self-intersecting or tip-touching balls into a tip ball) until the
// collection is pairwise disjoint. Degrees add under every merge; the union
// of the input balls is contained in the union of the output balls. The
// input need not contain a tip ball; one is created only when an absorption
// forces it.
std::vector<Ball> merge_balls(std::vector<Ball> balls, const ConeParams& cone);

// Admissible-family wrapper around merge_balls.
BallFamily merge(const BallFamily& family);

struct GrowthSnapshot {
  double time = 0.0;
  std::vector<Ball> balls;
};

struct MergeEvent {
  double time = 0.0;
  std::string description;
};

struct GrowthTrajectory {
  ConeParams cone;
  std::vector<GrowthSnapshot> snapshots;  // t=0, post-merge at each event, t_final
  std::vector<MergeEvent> events;

  explicit GrowthTrajectory(const ConeParams& c) : cone(c) {}

  // Family at an arbitrary time, radii scaled exponentially from the last
  // snapshot at or before t.
  std::vector<Ball> balls_at(double t) const;
};

// Exponential ball growth: radii scale as e^t between events; collision and
// self-intersection times are located by bisection to 1e-10 and resolved by
// merge_balls.
GrowthTrajectory grow(const BallFamily& family, double t_final);

// Accumulates pi |d_B| dt over off-tip balls and pi m(d_B, alpha) dt for the
// tip ball along the trajectory, minus the log 2 slack applied to the final
// rates.
double lower_bound_ledger(const GrowthTrajectory& traj, const ConeParams& cone);

// Rejection-sampled admissible family with n_off_tip off-tip balls, used by
// property tests and the growth subcommand.
BallFamily random_admissible_family(const ConeParams& cone, int n_off_tip,
                                    std::uint64_t seed);

}  // namespace conegl
