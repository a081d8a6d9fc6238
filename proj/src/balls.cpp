#include "conegl/balls.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "conegl/degree_cost.hpp"

namespace conegl {

namespace {

constexpr double kTouchTol = 1e-12;

bool closed_balls_intersect(const Ball& a, const Ball& b,
                            const ConeParams& cone) {
  const double d = a.is_tip() ? b.center.r
                  : b.is_tip() ? a.center.r
                               : geodesic_distance(a.center, b.center, cone);
  const double sum = a.radius + b.radius;
  return d <= sum * (1.0 + kTouchTol) + kTouchTol;
}

// Point at geodesic distance `dist` from a toward b along the unrolled
// straight segment (the geodesic, since minimal gaps stay below pi).
ConePoint point_along_geodesic(const ConePoint& a, const ConePoint& b,
                               double dist, const ConeParams& cone) {
  // Chart with a on the positive x-axis; the minimal gap keeps the whole
  // segment within relative angles in (-pi, pi), where atan2 is faithful.
  double delta = std::fmod(b.theta - a.theta, cone.alpha);
  if (delta > 0.5 * cone.alpha) delta -= cone.alpha;
  if (delta < -0.5 * cone.alpha) delta += cone.alpha;
  const double ax = a.r;
  const double ay = 0.0;
  const double bx = b.r * std::cos(delta);
  const double by = b.r * std::sin(delta);
  const double len = std::hypot(bx - ax, by - ay);
  const double t = (len > 0.0) ? dist / len : 0.0;
  const double px = ax + t * (bx - ax);
  const double py = ay + t * (by - ay);
  const double pr = std::hypot(px, py);
  if (pr == 0.0) return ConePoint{0.0, 0.0};
  double pt = a.theta + std::atan2(py, px);
  pt = std::fmod(pt, cone.alpha);
  if (pt < 0.0) pt += cone.alpha;
  return ConePoint{pr, pt};
}

// Enclosing ball of two intersecting balls: centered at the minimal
// enclosing center, with radius r + r'. At exact-touch events this is the
// minimal enclosing ball; in deeper overlaps it keeps the radius sum
// non-decreasing, which the growth lower bound relies on. Degrees add.
Ball enclose_pair(const Ball& a, const Ball& b, const ConeParams& cone) {
  const double d = geodesic_distance(a.center, b.center, cone);
  const double radius = a.radius + b.radius;
  ConePoint center;
  if (d + a.radius <= b.radius) {
    center = b.center;
  } else if (d + b.radius <= a.radius) {
    center = a.center;
  } else {
    const double from_a = 0.5 * (d + b.radius - a.radius);
    center = point_along_geodesic(a.center, b.center, from_a, cone);
  }
  return Ball{center, radius, a.degree + b.degree};
}

// Tip-centered ball containing both the existing tip ball (if any) and b.
// Radius max(tip radius, center distance) + radius(b): the smallest choice
// that both covers the union and never decreases the radius sum. At a touch
// event (center distance = tip radius + radius(b)) this equals the
// r' + 2r constant of the merging lemma.
Ball absorb_into_tip(const Ball* tip, const Ball& b) {
  if (!tip) {
    return Ball{ConePoint{0.0, 0.0}, b.center.r + b.radius, b.degree};
  }
  return Ball{ConePoint{0.0, 0.0},
              std::max(tip->radius, b.center.r) + b.radius,
              tip->degree + b.degree};
}

}  // namespace

double BallFamily::total_radius() const {
  double s = 0.0;
  for (const Ball& b : balls) s += b.radius;
  return s;
}

long BallFamily::total_degree() const {
  long s = 0;
  for (const Ball& b : balls) s += b.degree;
  return s;
}

const Ball* BallFamily::tip_ball() const {
  for (const Ball& b : balls) {
    if (b.is_tip()) return &b;
  }
  return nullptr;
}

void BallFamily::validate() const {
  int tips = 0;
  for (const Ball& b : balls) {
    if (!(b.radius > 0.0)) {
      throw std::invalid_argument("BallFamily: ball radius must be positive");
    }
    if (b.is_tip()) ++tips;
  }
  if (tips != 1) {
    throw std::invalid_argument("BallFamily: exactly one tip ball required");
  }
  for (std::size_t i = 0; i < balls.size(); ++i) {
    for (std::size_t j = i + 1; j < balls.size(); ++j) {
      const double d =
          balls[i].is_tip() ? balls[j].center.r
          : balls[j].is_tip()
              ? balls[i].center.r
              : geodesic_distance(balls[i].center, balls[j].center, cone);
      if (d <= balls[i].radius + balls[j].radius - 1e-12) {
        throw std::invalid_argument("BallFamily: balls are not pairwise disjoint");
      }
    }
  }
}

bool is_self_intersecting(const Ball& b, const ConeParams& cone) {
  if (b.is_tip()) return true;
  if (b.radius >= b.center.r) return true;
  return 2.0 * std::asin(b.radius / b.center.r) >= cone.alpha;
}

std::vector<Ball> merge_balls(std::vector<Ball> balls, const ConeParams& cone) {
  bool changed = true;
  while (changed) {
    changed = false;

    // Collapse duplicate tip balls.
    int tip_idx = -1;
    for (std::size_t i = 0; i < balls.size(); ++i) {
      if (!balls[i].is_tip()) continue;
      if (tip_idx < 0) {
        tip_idx = static_cast<int>(i);
      } else {
        balls[tip_idx].radius = std::max(balls[tip_idx].radius, balls[i].radius);
        balls[tip_idx].degree += balls[i].degree;
        balls.erase(balls.begin() + i);
        changed = true;
        break;
      }
    }
    if (changed) continue;

    // Absorb self-intersecting or tip-containing off-tip balls.
    for (std::size_t i = 0; i < balls.size(); ++i) {
      if (balls[i].is_tip()) continue;
      if (is_self_intersecting(balls[i], cone)) {
        const Ball* tip = (tip_idx >= 0) ? &balls[tip_idx] : nullptr;
        Ball merged = absorb_into_tip(tip, balls[i]);
        if (tip_idx >= 0) {
          balls[tip_idx] = merged;
          balls.erase(balls.begin() + i);
        } else {
          balls[i] = merged;
        }
        changed = true;
        break;
      }
    }
    if (changed) continue;

    // Resolve intersecting pairs in ascending index order.
    for (std::size_t i = 0; i < balls.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < balls.size() && !changed; ++j) {
        if (!closed_balls_intersect(balls[i], balls[j], cone)) continue;
        if (balls[i].is_tip() || balls[j].is_tip()) {
          const std::size_t t = balls[i].is_tip() ? i : j;
          const std::size_t o = balls[i].is_tip() ? j : i;
          balls[t] = absorb_into_tip(&balls[t], balls[o]);
          balls.erase(balls.begin() + o);
        } else {
          balls[i] = enclose_pair(balls[i], balls[j], cone);
          balls.erase(balls.begin() + j);
        }
        changed = true;
      }
    }
  }
  return balls;
}

BallFamily merge(const BallFamily& family) {
  BallFamily out(merge_balls(family.balls, family.cone), family.cone);
  out.validate();
  return out;
}

std::vector<Ball> GrowthTrajectory::balls_at(double t) const {
  const GrowthSnapshot* base = &snapshots.front();
  for (const GrowthSnapshot& s : snapshots) {
    if (s.time <= t + 1e-15) base = &s;
  }
  std::vector<Ball> out = base->balls;
  const double scale = std::exp(t - base->time);
  for (Ball& b : out) b.radius *= scale;
  return out;
}

namespace {

// Smallest margin before the next critical event, with radii scaled by s:
// pairwise touching and the onset of self-intersection.
double min_event_margin(const std::vector<Ball>& balls, double s,
                        const ConeParams& cone) {
  double m = std::numeric_limits<double>::infinity();
  const double half = 0.5 * std::min(cone.alpha, kPi);
  for (std::size_t i = 0; i < balls.size(); ++i) {
    if (!balls[i].is_tip()) {
      m = std::min(m, balls[i].center.r * std::sin(half) - s * balls[i].radius);
    }
    for (std::size_t j = i + 1; j < balls.size(); ++j) {
      const double d = balls[i].is_tip() ? balls[j].center.r
                       : balls[j].is_tip()
                           ? balls[i].center.r
                           : geodesic_distance(balls[i].center,
                                               balls[j].center, cone);
      m = std::min(m, d - s * (balls[i].radius + balls[j].radius));
    }
  }
  return m;
}

std::string describe(const std::vector<Ball>& before,
                     const std::vector<Ball>& after) {
  std::ostringstream os;
  os << "merge: " << before.size() << " -> " << after.size() << " balls";
  return os.str();
}

}  // namespace

GrowthTrajectory grow(const BallFamily& family, double t_final) {
  family.validate();
  if (!(t_final >= 0.0)) throw std::invalid_argument("grow: t_final must be >= 0");

  GrowthTrajectory traj(family.cone);
  traj.snapshots.push_back(GrowthSnapshot{0.0, family.balls});

  double t = 0.0;
  std::vector<Ball> cur = family.balls;
  while (t < t_final && cur.size() > 1) {
    // Event time solves min_event_margin(scale = e^{s-t}) = 0; the margin is
    // monotone decreasing in s.
    if (min_event_margin(cur, std::exp(t_final - t), family.cone) > 0.0) break;
    double lo = t, hi = t_final;
    if (min_event_margin(cur, 1.0, family.cone) <= 0.0) {
      hi = t;  // event fires immediately (touching input)
    } else {
      while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (min_event_margin(cur, std::exp(mid - t), family.cone) > 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
    }
    const double scale = std::exp(hi - t);
    for (Ball& b : cur) b.radius *= scale;
    std::vector<Ball> merged = merge_balls(cur, family.cone);
    traj.events.push_back(MergeEvent{hi, describe(cur, merged)});
    cur = std::move(merged);
    traj.snapshots.push_back(GrowthSnapshot{hi, cur});
    t = hi;
  }

  if (t < t_final) {
    const double scale = std::exp(t_final - t);
    std::vector<Ball> fin = cur;
    for (Ball& b : fin) b.radius *= scale;
    traj.snapshots.push_back(GrowthSnapshot{t_final, std::move(fin)});
  }
  return traj;
}

double lower_bound_ledger(const GrowthTrajectory& traj, const ConeParams& cone) {
  auto rate = [&](const std::vector<Ball>& balls) {
    double r = 0.0;
    for (const Ball& b : balls) {
      if (b.is_tip()) {
        r += kPi * m_closed(b.degree, cone);
      } else {
        r += kPi * std::abs(b.degree);
      }
    }
    return r;
  };
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < traj.snapshots.size(); ++j) {
    const double dt = traj.snapshots[j + 1].time - traj.snapshots[j].time;
    acc += rate(traj.snapshots[j].balls) * dt;
  }
  acc -= std::log(2.0) * rate(traj.snapshots.back().balls);
  return acc;
}

BallFamily random_admissible_family(const ConeParams& cone, int n_off_tip,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> deg(-2, 2);

  std::vector<Ball> balls;
  balls.push_back(
      Ball{ConePoint{0.0, 0.0}, 0.01 + 0.03 * unit(rng), deg(rng)});

  int attempts = 0;
  while (static_cast<int>(balls.size()) < n_off_tip + 1 && attempts < 20000) {
    ++attempts;
    Ball cand;
    cand.center = ConePoint{0.15 + 0.75 * unit(rng), cone.alpha * unit(rng)};
    cand.radius = 0.005 + 0.03 * unit(rng);
    cand.degree = deg(rng);
    if (is_self_intersecting(cand, cone)) continue;
    bool ok = true;
    for (const Ball& b : balls) {
      const double d = b.is_tip()
                           ? cand.center.r
                           : geodesic_distance(b.center, cand.center, cone);
      if (d <= b.radius + cand.radius + 0.01) {
        ok = false;
        break;
      }
    }
    if (ok) balls.push_back(cand);
  }
  BallFamily family(std::move(balls), cone);
  family.validate();
  return family;
}

}  // namespace conegl
