#include "conegl/vortex.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "conegl/errors.hpp"

namespace conegl {

namespace {

struct GridNode {
  int i = 0;
  long ku = 0;  // unwrapped angular index
};

struct Component {
  std::vector<GridNode> nodes;
  int min_i = 1 << 30, max_i = -1;
  long min_ku = 1L << 60, max_ku = -(1L << 60);
  bool wraps = false;  // winds all the way around the tip
  ConePoint centroid;
};

int wrap_k(long ku, int nt) {
  long k = ku % nt;
  if (k < 0) k += nt;
  return static_cast<int>(k);
}

std::vector<Component> find_components(const TangentField& f,
                                       double threshold) {
  const SectorGrid& g = f.grid();
  const int nr = g.n_r();
  const int nt = g.n_theta();
  std::vector<char> in_mask(g.size(), 0);
  for (int i = 0; i < nr; ++i) {
    for (int k = 0; k < nt; ++k) {
      in_mask[g.index(i, k)] = std::abs(f.at(i, k)) < threshold;
    }
  }
  std::vector<long> label_ku(g.size(), 0);
  std::vector<int> label(g.size(), -1);
  std::vector<Component> comps;

  for (int i0 = 0; i0 < nr; ++i0) {
    for (int k0 = 0; k0 < nt; ++k0) {
      const int idx0 = g.index(i0, k0);
      if (!in_mask[idx0] || label[idx0] >= 0) continue;
      Component comp;
      const int id = static_cast<int>(comps.size());
      std::deque<GridNode> queue = {GridNode{i0, k0}};
      label[idx0] = id;
      label_ku[idx0] = k0;
      while (!queue.empty()) {
        const GridNode n = queue.front();
        queue.pop_front();
        comp.nodes.push_back(n);
        comp.min_i = std::min(comp.min_i, n.i);
        comp.max_i = std::max(comp.max_i, n.i);
        comp.min_ku = std::min(comp.min_ku, n.ku);
        comp.max_ku = std::max(comp.max_ku, n.ku);
        const GridNode nbrs[4] = {GridNode{n.i - 1, n.ku},
                                  GridNode{n.i + 1, n.ku},
                                  GridNode{n.i, n.ku - 1},
                                  GridNode{n.i, n.ku + 1}};
        for (const GridNode& nb : nbrs) {
          if (nb.i < 0 || nb.i >= nr) continue;
          const int idx = g.index(nb.i, wrap_k(nb.ku, nt));
          if (!in_mask[idx]) continue;
          if (label[idx] == id) {
            if (label_ku[idx] != nb.ku) comp.wraps = true;
            continue;
          }
          if (label[idx] >= 0) continue;
          label[idx] = id;
          label_ku[idx] = nb.ku;
          queue.push_back(nb);
        }
      }
      comps.push_back(std::move(comp));
    }
  }

  // centroids, weighted by (1 - |u|^2), in a chart anchored at the first node
  for (Component& c : comps) {
    const long ku_ref = c.nodes.front().ku;
    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (const GridNode& n : c.nodes) {
      const double r = g.radius(n.i);
      const double rel = (n.ku - ku_ref) * g.dtheta();
      const cplx v = f.at(n.i, wrap_k(n.ku, nt));
      const double w = std::max(1e-12, 1.0 - std::norm(v));
      sw += w;
      sx += w * r * std::cos(rel);
      sy += w * r * std::sin(rel);
    }
    const double cx = sx / sw, cy = sy / sw;
    const double cr = std::hypot(cx, cy);
    const double ang = ku_ref * g.dtheta() + std::atan2(cy, cx);
    c.centroid = make_cone_point(std::min(cr, 1.0), ang, g.cone());
  }
  return comps;
}

bool node_clean(const TangentField& f, int i, long ku, double threshold) {
  return std::abs(f.at(i, wrap_k(ku, f.grid().n_theta()))) > threshold;
}

// Winding of the positively oriented rectangle [ia, ib] x [ka, kb] in
// (radius index, unwrapped angle index) space; seam factors handled by
// sample().
double rectangle_winding(const TangentField& f, int ia, int ib, long ka,
                         long kb) {
  double acc = 0.0;
  auto step = [&](const cplx& from, const cplx& to) {
    if (std::abs(from) < 1e-9 || std::abs(to) < 1e-9) {
      throw UnresolvedCore("enclosing loop crosses a vanishing node");
    }
    acc += std::arg(to / from);
  };
  for (long k = ka; k < kb; ++k) step(f.sample(ib, k), f.sample(ib, k + 1));
  for (int i = ib; i > ia; --i) step(f.sample(i, kb), f.sample(i - 1, kb));
  for (long k = kb; k > ka; --k) step(f.sample(ia, k), f.sample(ia, k - 1));
  for (int i = ia; i < ib; ++i) step(f.sample(i, ka), f.sample(i + 1, ka));
  return acc / kTwoPi;
}

bool ring_clean(const TangentField& f, int ia, int ib, long ka, long kb,
                double threshold) {
  for (long k = ka; k <= kb; ++k) {
    if (!node_clean(f, ia, k, threshold) || !node_clean(f, ib, k, threshold)) {
      return false;
    }
  }
  for (int i = ia; i <= ib; ++i) {
    if (!node_clean(f, i, ka, threshold) || !node_clean(f, i, kb, threshold)) {
      return false;
    }
  }
  return true;
}

int circle_all_clean_index(const TangentField& f, double threshold) {
  const SectorGrid& g = f.grid();
  for (int i = 0; i < g.n_r(); ++i) {
    bool clean = true;
    for (int k = 0; k < g.n_theta(); ++k) {
      if (!(std::abs(f.at(i, k)) > threshold)) {
        clean = false;
        break;
      }
    }
    if (clean) return i;
  }
  throw UnresolvedCore("no clean circle exists on the grid");
}

}  // namespace

VortexSet detect_vortices(const TangentField& field, double epsilon,
                          const DetectOptions& opts) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("detect_vortices: epsilon <= 0");
  const SectorGrid& g = field.grid();
  const ConeParams& cone = g.cone();

  std::vector<Component> comps = find_components(field, opts.core_threshold);

  const double tip_band = std::min(3.0 * std::sqrt(epsilon), opts.tip_band_cap);
  std::vector<Component*> off;
  for (Component& c : comps) {
    const bool tip_side = c.wraps || c.min_i == 0 || c.centroid.r <= tip_band;
    if (!tip_side) off.push_back(&c);
  }

  // coalesce off-tip components closer than merge_factor * eps
  std::vector<std::vector<Component*>> clusters;
  std::vector<char> used(off.size(), 0);
  for (std::size_t a = 0; a < off.size(); ++a) {
    if (used[a]) continue;
    std::vector<Component*> cluster = {off[a]};
    used[a] = 1;
    for (bool grew = true; grew;) {
      grew = false;
      for (std::size_t b = 0; b < off.size(); ++b) {
        if (used[b]) continue;
        for (Component* m : cluster) {
          if (geodesic_distance(m->centroid, off[b]->centroid, cone) <
              opts.merge_factor * epsilon) {
            cluster.push_back(off[b]);
            used[b] = 1;
            grew = true;
            break;
          }
        }
      }
    }
    clusters.push_back(std::move(cluster));
  }

  VortexSet out;
  int innermost_vortex_i = g.n_r();
  for (const std::vector<Component*>& cluster : clusters) {
    int ia = 1 << 30, ib = -1;
    long ka = 1L << 60, kb = -(1L << 60);
    double sw = 0.0, sx = 0.0, sy = 0.0;
    const long ku_ref = cluster.front()->nodes.front().ku;
    for (const Component* c : cluster) {
      ia = std::min(ia, c->min_i);
      ib = std::max(ib, c->max_i);
      // re-anchor each member's angular span next to the cluster anchor
      const double rel0 = std::remainder(
          (c->nodes.front().ku - ku_ref) * g.dtheta(), cone.alpha);
      const long shift =
          std::lround(rel0 / g.dtheta()) - (c->nodes.front().ku - ku_ref);
      ka = std::min(ka, c->min_ku + shift);
      kb = std::max(kb, c->max_ku + shift);
      for (const GridNode& n : c->nodes) {
        const double r = g.radius(n.i);
        const double rel = (n.ku + shift - ku_ref) * g.dtheta();
        const cplx v = field.at(n.i, wrap_k(n.ku, g.n_theta()));
        const double w = std::max(1e-12, 1.0 - std::norm(v));
        sw += w;
        sx += w * r * std::cos(rel);
        sy += w * r * std::sin(rel);
      }
    }
    if (kb - ka >= g.n_theta()) {
      throw UnresolvedCore("off-tip component wraps the full circle");
    }

    bool enclosed = false;
    double winding = 0.0;
    for (int p = 1; p <= opts.max_loop_expand; ++p) {
      // cores squeezed against the outer boundary clamp there; the boundary
      // row carries unit-modulus data and is always clean
      const int ia2 = ia - p;
      const int ib2 = std::min(ib + p, g.n_r() - 1);
      const long ka2 = ka - p, kb2 = kb + p;
      if (ia2 < 0) break;
      if (kb2 - ka2 >= g.n_theta()) break;
      if (!ring_clean(field, ia2, ib2, ka2, kb2, opts.clean_threshold)) continue;
      winding = rectangle_winding(field, ia2, ib2, ka2, kb2);
      innermost_vortex_i = std::min(innermost_vortex_i, ia2);
      enclosed = true;
      break;
    }
    if (!enclosed) {
      throw UnresolvedCore("no clean enclosing loop within the expansion limit");
    }
    const double rounded = std::round(winding);
    if (std::fabs(winding - rounded) >= 0.1) {
      throw UnresolvedCore("enclosing-loop winding is not close to an integer");
    }

    DetectedVortex v;
    const double cx = sx / sw, cy = sy / sw;
    v.position = make_cone_point(std::min(std::hypot(cx, cy), 1.0),
                                 ku_ref * g.dtheta() + std::atan2(cy, cx), cone);
    v.degree = static_cast<int>(rounded);
    out.vortices.push_back(v);
  }

  const int tip_circle = circle_all_clean_index(field, opts.clean_threshold);
  if (tip_circle >= innermost_vortex_i) {
    throw UnresolvedCore("tip circle would enclose an off-tip vortex");
  }
  out.tip_degree = degree(field, tip_circle);
  out.dbar = degree(field, g.n_r() - 1);

  long sum = out.tip_degree;
  for (const DetectedVortex& v : out.vortices) sum += v.degree;
  if (sum != out.dbar) {
    throw InconsistentDegrees(
        "tip + off-tip degrees do not sum to the boundary degree");
  }
  return out;
}

ExpansionFit fit_expansion(const std::vector<std::pair<double, double>>& runs) {
  if (runs.size() < 3) {
    throw std::invalid_argument("fit_expansion: need at least 3 runs");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(runs.size());
  for (const auto& [eps, energy] : runs) {
    if (!(eps > 0.0)) throw std::invalid_argument("fit_expansion: epsilon <= 0");
    const double x = std::log(1.0 / eps);
    sx += x;
    sy += energy;
    sxx += x * x;
    sxy += x * energy;
  }
  const double det = n * sxx - sx * sx;
  if (std::fabs(det) < 1e-12 * std::max(1.0, sxx)) {
    throw DegenerateDesign("fit_expansion: epsilons do not vary");
  }
  ExpansionFit fit;
  fit.slope = (n * sxy - sx * sy) / det;
  fit.intercept = (sy * sxx - sx * sxy) / det;
  for (const auto& [eps, energy] : runs) {
    const double x = std::log(1.0 / eps);
    fit.max_residual = std::max(
        fit.max_residual, std::fabs(energy - fit.slope * x - fit.intercept));
  }
  return fit;
}

BallFamily bad_set_family(const TangentField& field, double epsilon,
                          const DetectOptions& opts) {
  const SectorGrid& g = field.grid();
  const ConeParams& cone = g.cone();
  const double cell = std::max(g.dr(), g.dtheta());

  std::vector<Component> comps = find_components(field, opts.core_threshold);
  const double tip_band = std::min(3.0 * std::sqrt(epsilon), opts.tip_band_cap);

  double tip_reach = g.r_min() + 2.0 * g.dr();
  std::vector<Ball> off_balls;
  for (const Component& c : comps) {
    const bool tip_side = c.wraps || c.min_i == 0 || c.centroid.r <= tip_band;
    if (tip_side) {
      tip_reach = std::max(tip_reach, g.radius(c.max_i) + 2.0 * g.dr());
      continue;
    }
    double radius = 2.0 * cell;
    for (const GridNode& n : c.nodes) {
      const ConePoint x = make_cone_point(
          g.radius(n.i), wrap_k(n.ku, g.n_theta()) * g.dtheta(), cone);
      radius = std::max(radius,
                        geodesic_distance(x, c.centroid, cone) + 2.0 * cell);
    }
    off_balls.push_back(Ball{c.centroid, radius, 0});
  }

  // tip ball radius: first clean circle at or beyond the tip bad set
  int tip_i = 0;
  while (tip_i + 1 < g.n_r() && g.radius(tip_i) < tip_reach) ++tip_i;
  for (; tip_i < g.n_r(); ++tip_i) {
    bool clean = true;
    for (int k = 0; k < g.n_theta(); ++k) {
      if (!(std::abs(field.at(tip_i, k)) > opts.clean_threshold)) {
        clean = false;
        break;
      }
    }
    if (clean) break;
  }
  if (tip_i >= g.n_r()) {
    throw UnresolvedCore("bad_set_family: no clean tip circle");
  }

  std::vector<Ball> all = {
      Ball{ConePoint{0.0, 0.0}, g.radius(tip_i), degree(field, tip_i)}};

  // attach off-tip degrees from the detector so both views stay consistent
  const VortexSet vs = detect_vortices(field, epsilon, opts);
  for (Ball b : off_balls) {
    for (const DetectedVortex& v : vs.vortices) {
      if (geodesic_distance(b.center, v.position, cone) <
          opts.merge_factor * epsilon) {
        b.degree += v.degree;
      }
    }
    all.push_back(b);
  }

  BallFamily family(merge_balls(std::move(all), cone), cone);
  family.validate();
  return family;
}

}  // namespace conegl
