#include "conegl/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "conegl/degree_cost.hpp"
#include "conegl/errors.hpp"

namespace conegl {

// --- boundary flux -----------------------------------------------------------

double BoundaryFlux::evaluate(double t) const {
  double v = 1.0;
  for (std::size_t n = 0; n < cos_coef.size(); ++n) {
    v += cos_coef[n] * std::cos((n + 1.0) * t);
  }
  for (std::size_t n = 0; n < sin_coef.size(); ++n) {
    v += sin_coef[n] * std::sin((n + 1.0) * t);
  }
  return v;
}

BoundaryFlux BoundaryFlux::from_samples(const std::vector<double>& samples,
                                        int modes) {
  const int m = static_cast<int>(samples.size());
  if (m < 2 * modes + 1) {
    throw std::invalid_argument("BoundaryFlux::from_samples: too few samples");
  }
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= m;
  if (std::fabs(mean - 1.0) > 1e-8) {
    throw std::invalid_argument(
        "BoundaryFlux: sample mean must equal 1 (total flux 2 pi)");
  }
  BoundaryFlux flux;
  flux.cos_coef.assign(modes, 0.0);
  flux.sin_coef.assign(modes, 0.0);
  for (int n = 1; n <= modes; ++n) {
    double a = 0.0, b = 0.0;
    for (int j = 0; j < m; ++j) {
      const double t = kTwoPi * j / m;
      a += samples[j] * std::cos(n * t);
      b += samples[j] * std::sin(n * t);
    }
    flux.cos_coef[n - 1] = 2.0 * a / m;
    flux.sin_coef[n - 1] = 2.0 * b / m;
  }
  return flux;
}

// --- Green's function --------------------------------------------------------

GreensFunction::GreensFunction(BoundaryFlux flux, int quadrature_points)
    : flux_(std::move(flux)), quad_(quadrature_points) {
  if (quad_ < 64) {
    throw std::invalid_argument("GreensFunction: need >= 64 quadrature points");
  }
}

double GreensFunction::harmonic_correction(cplx z) const {
  if (flux_.is_constant()) return 0.0;
  const double rho = std::abs(z);
  const double t = std::arg(z);
  double h = 0.0;
  double rho_n = rho;
  const int modes = flux_.modes();
  for (int n = 1; n <= modes; ++n) {
    const double a = (n <= static_cast<int>(flux_.cos_coef.size()))
                         ? flux_.cos_coef[n - 1]
                         : 0.0;
    const double b = (n <= static_cast<int>(flux_.sin_coef.size()))
                         ? flux_.sin_coef[n - 1]
                         : 0.0;
    h += rho_n / n * (a * std::cos(n * t) + b * std::sin(n * t));
    rho_n *= rho;
  }
  return h;
}

double GreensFunction::normalization(cplx p) const {
  if (!(std::abs(p) < 1.0)) {
    throw std::invalid_argument("GreensFunction: |p| must be < 1");
  }
  if (flux_.is_constant()) {
    // mean of 2 log|zeta - p| over the circle vanishes for |p| < 1
    return 0.0;
  }
  double acc = 0.0;
  for (int j = 0; j < quad_; ++j) {
    const double t = kTwoPi * j / quad_;
    const cplx zeta = std::polar(1.0, t);
    const double base = std::log(std::abs(zeta - p)) +
                        std::log(std::abs(1.0 - zeta * std::conj(p))) +
                        harmonic_correction(zeta);
    acc += base * flux_.evaluate(t);
  }
  return -acc / quad_;
}

double GreensFunction::evaluate(cplx z, cplx p) const {
  if (std::abs(z - p) < 1e-12) {
    throw SingularEvaluation("neumann_green: |z - p| < 1e-12");
  }
  if (std::abs(z) > 1.0 + 1e-12 || !(std::abs(p) < 1.0)) {
    throw std::invalid_argument("neumann_green: need |z| <= 1 and |p| < 1");
  }
  return std::log(std::abs(z - p)) + std::log(std::abs(1.0 - z * std::conj(p))) +
         harmonic_correction(z) + normalization(p);
}

double GreensFunction::regular_part(cplx z, cplx p) const {
  if (std::abs(z) > 1.0 + 1e-12 || !(std::abs(p) < 1.0)) {
    throw std::invalid_argument("regular_part: need |z| <= 1 and |p| < 1");
  }
  return std::log(std::abs(1.0 - z * std::conj(p))) + harmonic_correction(z) +
         normalization(p);
}

double neumann_green(const BoundaryFlux& flux, cplx z, cplx p) {
  return GreensFunction(flux).evaluate(z, p);
}

double regular_part(const BoundaryFlux& flux, cplx z, cplx p) {
  return GreensFunction(flux).regular_part(z, p);
}

// --- vortex configurations ---------------------------------------------------

int select_case(int dbar, const ConeParams& cone) {
  if (dbar == 1) return 3;
  if (dbar < 1 && cone.alpha > kTwoPi / 3.0) return 2;
  return 1;
}

VortexConfig make_config(int dbar, const ConeParams& cone,
                         const std::vector<cplx>& off_origin_positions) {
  VortexConfig config;
  config.dbar = dbar;
  config.caseno = select_case(dbar, cone);
  const int sgn = (dbar >= 1) ? 1 : -1;
  const int expected = (config.caseno == 1)   ? std::abs(dbar - 1)
                       : (config.caseno == 2) ? std::abs(dbar)
                                              : 0;
  if (static_cast<int>(off_origin_positions.size()) != expected) {
    throw std::invalid_argument("make_config: wrong number of vortex positions");
  }
  if (config.caseno == 2) {
    config.disc_positions.push_back(cplx{0.0, 0.0});
    config.degrees.push_back(-1);
  }
  for (const cplx& z : off_origin_positions) {
    if (!(std::abs(z) < 1.0)) {
      throw std::invalid_argument("make_config: positions must lie inside the disc");
    }
    if (std::abs(z) < 1e-9) {
      throw std::invalid_argument("make_config: off-origin position at the origin");
    }
    config.disc_positions.push_back(z);
    config.degrees.push_back(config.caseno == 2 ? -1 : sgn);
  }
  return config;
}

namespace {

void check_distinct(const std::vector<cplx>& zs) {
  for (std::size_t i = 0; i < zs.size(); ++i) {
    for (std::size_t j = i + 1; j < zs.size(); ++j) {
      if (std::abs(zs[i] - zs[j]) < 1e-9) {
        throw CoincidentVortices("vortex positions closer than 1e-9");
      }
    }
  }
}

}  // namespace

double harmonic_phase_energy(const std::vector<double>& cos_coef,
                             const std::vector<double>& sin_coef) {
  double e = 0.0;
  for (std::size_t n = 0; n < cos_coef.size(); ++n) {
    e += (n + 1.0) * cos_coef[n] * cos_coef[n];
  }
  for (std::size_t n = 0; n < sin_coef.size(); ++n) {
    e += (n + 1.0) * sin_coef[n] * sin_coef[n];
  }
  return 0.5 * kPi * e;
}

double renormalized_energy(const VortexConfig& config, const ConeParams& cone,
                           const BoundaryFlux& flux) {
  if (config.caseno == 3) {
    // canonical data: the boundary phase is constant, so its harmonic
    // extension carries no Dirichlet energy
    return 0.0;
  }
  check_distinct(config.disc_positions);
  const GreensFunction green(flux);
  const double alpha = cone.alpha;
  const int sgn = (config.dbar >= 1) ? 1 : -1;
  double w = 0.0;
  for (std::size_t j = 0; j < config.disc_positions.size(); ++j) {
    const cplx zj = config.disc_positions[j];
    const double aj = std::abs(zj);
    const bool at_origin = aj < 1e-9;
    if (config.caseno == 1 && at_origin) {
      throw std::invalid_argument("renormalized_energy: Case 1 vortex at the origin");
    }
    if (!at_origin) {
      // -alpha sgn(dbar-1) log|z_j| and the conformal derivative term
      w += -alpha * sgn * std::log(aj);
      w += kPi * std::log(conformal_derivative_modulus(zj, cone));
    }
    w += -kPi * green.regular_part(zj, zj);
    for (std::size_t i = 0; i < config.disc_positions.size(); ++i) {
      if (i == j) continue;
      w += -kPi * green.evaluate(config.disc_positions[i], zj);
    }
  }
  return w;
}

// --- minimize_W --------------------------------------------------------------

namespace {

double w_objective(const std::vector<cplx>& off, int dbar,
                   const ConeParams& cone, const BoundaryFlux& flux) {
  for (const cplx& z : off) {
    const double a = std::abs(z);
    if (a >= 0.995 || a <= 2e-3) return std::numeric_limits<double>::infinity();
  }
  for (std::size_t i = 0; i < off.size(); ++i) {
    for (std::size_t j = i + 1; j < off.size(); ++j) {
      if (std::abs(off[i] - off[j]) < 1e-6) {
        return std::numeric_limits<double>::infinity();
      }
    }
  }
  return renormalized_energy(make_config(dbar, cone, off), cone, flux);
}

}  // namespace

VortexConfig minimize_W(int dbar, const ConeParams& cone,
                        const BoundaryFlux& flux, int K,
                        const MinimizeWOptions& opts) {
  const int caseno = select_case(dbar, cone);
  const int expected = (caseno == 1)   ? std::abs(dbar - 1)
                       : (caseno == 2) ? std::abs(dbar)
                                       : 0;
  if (K != expected) {
    throw std::invalid_argument("minimize_W: K inconsistent with the case");
  }
  if (K == 0) return make_config(dbar, cone, {});

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> ur(0.15, 0.85);
  std::uniform_real_distribution<double> ua(0.0, kTwoPi);

  const double h = 1e-6;
  auto objective = [&](const std::vector<cplx>& off) {
    return w_objective(off, dbar, cone, flux);
  };

  bool have_best = false;
  double best_value = 0.0;
  std::vector<cplx> best_positions;

  for (int start = 0; start < opts.starts; ++start) {
    std::vector<cplx> x(K);
    for (cplx& z : x) z = std::polar(ur(rng), ua(rng));
    double fx = objective(x);
    if (!std::isfinite(fx)) continue;

    std::vector<double> grad(2 * K, 0.0), grad_new(2 * K, 0.0);
    auto eval_grad = [&](const std::vector<cplx>& p, std::vector<double>& g) {
      std::vector<cplx> q = p;
      for (int c = 0; c < 2 * K; ++c) {
        const int j = c / 2;
        const cplx delta = (c % 2 == 0) ? cplx{h, 0.0} : cplx{0.0, h};
        q[j] = p[j] + delta;
        const double fp = objective(q);
        q[j] = p[j] - delta;
        const double fm = objective(q);
        q[j] = p[j];
        g[c] = (std::isfinite(fp) && std::isfinite(fm)) ? (fp - fm) / (2.0 * h)
                                                        : 0.0;
      }
    };

    eval_grad(x, grad);
    double step = 0.02;
    bool converged = false;
    for (int it = 0; it < opts.max_iters; ++it) {
      double g2 = 0.0;
      for (double g : grad) g2 += g * g;
      if (std::sqrt(g2) < opts.grad_tol) {
        converged = true;
        break;
      }
      double tau = std::clamp(step, 1e-12, 1.0);
      bool accepted = false;
      std::vector<cplx> xn(K);
      double fn = 0.0;
      for (int bt = 0; bt < 50; ++bt) {
        for (int j = 0; j < K; ++j) {
          xn[j] = x[j] - tau * cplx{grad[2 * j], grad[2 * j + 1]};
        }
        fn = objective(xn);
        if (std::isfinite(fn) && fn <= fx - 1e-4 * tau * g2) {
          accepted = true;
          break;
        }
        tau *= 0.5;
      }
      if (!accepted) break;
      eval_grad(xn, grad_new);
      double ss = 0.0, sy = 0.0;
      for (int c = 0; c < 2 * K; ++c) {
        const int j = c / 2;
        const double s = (c % 2 == 0) ? (xn[j] - x[j]).real()
                                      : (xn[j] - x[j]).imag();
        ss += s * s;
        sy += s * (grad_new[c] - grad[c]);
      }
      step = (sy > 1e-300) ? ss / sy : tau * 2.0;
      x = xn;
      fx = fn;
      grad = grad_new;
    }
    if (!converged) continue;
    bool interior = true;
    for (const cplx& z : x) {
      if (std::abs(z) > 0.98) interior = false;
    }
    if (!interior) continue;
    if (!have_best || fx < best_value - 1e-14) {
      have_best = true;
      best_value = fx;
      best_positions = x;
    }
  }
  if (!have_best) {
    throw NoInteriorMinimum("minimize_W: no start converged to an interior minimum");
  }
  return make_config(dbar, cone, best_positions);
}

// --- canonical harmonic map helpers ------------------------------------------

namespace {

struct CanonicalMap {
  std::vector<cplx> zs;  // disc vortex positions (z_0 = 0 included in Case 2)
  int sgn = 1;

  cplx phase_value(cplx z) const {
    cplx v{1.0, 0.0};
    for (const cplx& zj : zs) {
      cplx w = (z - zj) * (1.0 - z * std::conj(zj));
      const double a = std::abs(w);
      if (a < 1e-300) return cplx{0.0, 0.0};
      v *= w / a;
    }
    return (sgn >= 0) ? v : std::conj(v);
  }

  // F'/F with F = prod (z - z_j)(1 - z conj z_j)
  cplx log_deriv(cplx z) const {
    cplx s{0.0, 0.0};
    for (const cplx& zj : zs) {
      s += 1.0 / (z - zj) - std::conj(zj) / (1.0 - z * std::conj(zj));
    }
    return s;
  }
};

CanonicalMap canonical_map(const VortexConfig& config) {
  CanonicalMap m;
  m.zs = config.disc_positions;
  m.sgn = (config.dbar >= 1) ? 1 : -1;
  if (config.caseno == 3) m.zs.clear();
  return m;
}

// Exterior field evaluated at an arbitrary (possibly unwrapped) angle: the
// full-turn periodicity of z and the explicit e^{i theta} factor make the
// seam jump automatic.
cplx exterior_value(const CanonicalMap& map, const ConeParams& cone, double r,
                    double theta) {
  const double b = kTwoPi / cone.alpha;
  const cplx z = std::polar(std::pow(r, b), b * theta);
  return map.phase_value(z) * std::polar(1.0, theta);
}

}  // namespace

// --- test field construction -------------------------------------------------

namespace {

// Fourier modes of the boundary-phase mismatch chi on a matching circle,
// and the Dirichlet energy of its harmonic extension into the hole
// ((pi/2) sum n (a_n^2 + b_n^2), the same for disc and sector holes).
struct ChiModes {
  double beta = 0.0;  // circular-mean offset
  std::vector<double> a, b;

  double extension_energy() const {
    double e = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) {
      e += (n + 1.0) * (a[n] * a[n] + b[n] * b[n]);
    }
    return 0.5 * kPi * e;
  }

  double evaluate(double decay, double angle) const {
    // decay = (s/rho)^growth per mode; caller supplies the base ratio
    double chi = 0.0;
    double pow_n = decay;
    for (std::size_t n = 0; n < a.size(); ++n) {
      chi += pow_n * (a[n] * std::cos((n + 1.0) * angle) +
                      b[n] * std::sin((n + 1.0) * angle));
      pow_n *= decay;
    }
    return chi;
  }
};

ChiModes analyze_chi(const std::vector<cplx>& residuals, int n_modes) {
  const int M = static_cast<int>(residuals.size());
  ChiModes cm;
  cplx acc{0.0, 0.0};
  for (const cplx& r : residuals) acc += r;
  cm.beta = std::arg(acc);
  std::vector<double> chi(M);
  for (int m = 0; m < M; ++m) {
    chi[m] = std::arg(residuals[m] * std::polar(1.0, -cm.beta));
  }
  cm.a.assign(n_modes, 0.0);
  cm.b.assign(n_modes, 0.0);
  for (int n = 1; n <= n_modes; ++n) {
    double a = 0.0, b = 0.0;
    for (int m = 0; m < M; ++m) {
      const double t = kTwoPi * m / M;
      a += chi[m] * std::cos(n * t);
      b += chi[m] * std::sin(n * t);
    }
    cm.a[n - 1] = 2.0 * a / M;
    cm.b[n - 1] = 2.0 * b / M;
  }
  return cm;
}

}  // namespace

TangentField build_test_field(int dbar, const ConeParams& cone, double epsilon,
                              const VortexConfig& config,
                              const SectorGrid& grid, BuildInfo* info) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("build_test_field: epsilon <= 0");
  if (grid.r_max() != 1.0) {
    throw std::invalid_argument("build_test_field: grid must cover [r_min, 1]");
  }
  if (config.dbar != dbar) {
    throw std::invalid_argument("build_test_field: config/dbar mismatch");
  }
  const CanonicalMap cmap = canonical_map(config);

  struct Hole {
    ConePoint center;
    double radius = 0.0;
    int sgn = 0;
    RadialCore profile;
    ChiModes chi;
  };
  std::vector<Hole> holes;
  for (std::size_t j = 0; j < config.disc_positions.size(); ++j) {
    const cplx zj = config.disc_positions[j];
    if (std::abs(zj) < 1e-9) continue;  // tip vortex handled by the core
    const cplx bj = disc_to_sector(zj, cone);
    Hole hole;
    hole.center = make_cone_point(std::abs(bj), std::arg(bj), cone);
    hole.sgn = config.degrees[j];
    holes.push_back(hole);
  }

  // Hole radii: sqrt(eps) plus the distortion margin, capped so the holes
  // stay separated from each other, the tip hole, and the outer boundary.
  // The caps depend only on the configuration geometry, so at desk-scale
  // epsilon the radii stop tracking epsilon instead of overflowing.
  const double gap = 3.0 * grid.dr();
  const double want = std::sqrt(epsilon) + 2.0 * std::pow(epsilon, 0.75);
  bool reduced = false;
  for (Hole& hole : holes) {
    const double cap_boundary = (1.0 - hole.center.r) - gap;
    hole.radius = std::min(want, cap_boundary);
    if (hole.radius < want) reduced = true;
  }
  for (int pass = 0; pass < 4; ++pass) {
    for (std::size_t j = 0; j < holes.size(); ++j) {
      for (std::size_t i = 0; i < j; ++i) {
        const double d = geodesic_distance(holes[i].center, holes[j].center, cone);
        const double sum = holes[i].radius + holes[j].radius;
        if (sum + gap > d) {
          const double scale = (d - gap) / sum;
          if (scale <= 0.0) {
            throw OverlappingExcisions(
                "build_test_field: off-tip excisions overlap at this epsilon");
          }
          holes[i].radius *= scale;
          holes[j].radius *= scale;
          reduced = true;
        }
      }
    }
  }
  double tip_radius = std::sqrt(epsilon);
  for (const Hole& hole : holes) {
    tip_radius = std::min(tip_radius, hole.center.r - hole.radius - gap);
  }
  if (tip_radius < std::sqrt(epsilon)) reduced = true;
  if (tip_radius < 6.0 * grid.dr()) {
    throw OverlappingExcisions("build_test_field: no room for the tip core");
  }
  for (const Hole& hole : holes) {
    const double cell = std::max(grid.dr(), hole.center.r * grid.dtheta());
    if (hole.radius < 4.0 * cell) {
      throw OverlappingExcisions(
          "build_test_field: excised holes cannot be resolved on this grid");
    }
  }

  // radial core profiles for the off-tip holes
  if (info) info->off_core_values.clear();
  for (Hole& hole : holes) {
    hole.profile =
        minimize_radial_core(kPi, 1.0, epsilon / hole.radius, 1.0, 1500);
    if (info) info->off_core_values.push_back(hole.profile.value);
  }

  // tip core: mu_1 for Cases 1/3, mu_2 for Case 2
  const int which = (config.caseno == 2) ? 2 : 1;
  const double coef = (which == 1) ? 1.0 : 1.0 - kTwoPi / cone.alpha;
  CoreOptions core_opts;
  core_opts.n_r = 192;
  core_opts.n_theta = grid.n_theta();
  core_opts.solver.grad_tol = 1e-6;
  core_opts.solver.max_iters = 30000;
  const CoreSolution core = solve_core_mu(which, epsilon, tip_radius, cone, core_opts);
  if (info) info->core_mu_value = core.value;

  auto hole_chart = [&](const Hole& hole, double r, double theta, double* s,
                        double* phi, double* rep) {
    const double rel = std::remainder(theta - hole.center.theta, cone.alpha);
    const double trep = hole.center.theta + rel;
    const double px = r * std::cos(rel);
    const double py = r * std::sin(rel);
    *s = std::hypot(px - hole.center.r, py);
    *phi = std::atan2(py, px - hole.center.r);
    *rep = trep;
  };

  // boundary-phase mismatch on each matching circle, as Fourier data
  const int n_modes = 24;
  for (Hole& hole : holes) {
    const int M = 256;
    std::vector<cplx> residuals(M);
    for (int m = 0; m < M; ++m) {
      const double phi = kTwoPi * m / M;
      const double px = hole.center.r + hole.radius * std::cos(phi);
      const double py = hole.radius * std::sin(phi);
      const double rr = std::hypot(px, py);
      const double tt = hole.center.theta + std::atan2(py, px);
      residuals[m] =
          exterior_value(cmap, cone, rr, tt) * std::polar(1.0, -hole.sgn * phi);
    }
    hole.chi = analyze_chi(residuals, n_modes);
  }
  ChiModes tip_chi;
  {
    const int M = grid.n_theta();
    std::vector<cplx> residuals(M);
    for (int k = 0; k < M; ++k) {
      const double t = grid.angle(k);
      residuals[k] =
          exterior_value(cmap, cone, tip_radius, t) * std::polar(1.0, -coef * t);
    }
    // chi is alpha-periodic; the analysis runs in the scaled angle 2 pi t/alpha
    tip_chi = analyze_chi(residuals, n_modes);
  }

  auto interp_profile = [](const RadialCore& rc, double x) {
    if (x <= 0.0) return rc.profile.front();
    if (x >= 1.0) return rc.profile.back();
    const std::size_t n = rc.radii.size();
    std::size_t lo = 0, hi = n - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (rc.radii[mid] <= x ? lo : hi) = mid;
    }
    const double t = (x - rc.radii[lo]) / (rc.radii[hi] - rc.radii[lo]);
    return rc.profile[lo] + t * (rc.profile[hi] - rc.profile[lo]);
  };

  const SectorGrid& cg = core.field.grid();
  auto core_value = [&](double r, int k) {
    double x = (r - cg.r_min()) / cg.dr();
    x = std::clamp(x, 0.0, static_cast<double>(cg.n_r() - 1));
    const int lo = std::min(static_cast<int>(x), cg.n_r() - 2);
    const double t = x - lo;
    return core.field.at(lo, k) * (1.0 - t) + core.field.at(lo + 1, k) * t;
  };

  TangentField out(grid);
  for (int i = 0; i < grid.n_r(); ++i) {
    const double r = grid.radius(i);
    for (int k = 0; k < grid.n_theta(); ++k) {
      const double theta = grid.angle(k);
      cplx value;
      bool assigned = false;
      for (const Hole& hole : holes) {
        double s = 0.0, phi = 0.0, rep = 0.0;
        hole_chart(hole, r, theta, &s, &phi, &rep);
        if (s > hole.radius) continue;
        const cplx rewrap = std::polar(1.0, theta - rep);
        const double f = interp_profile(hole.profile, s / hole.radius);
        const double chi =
            hole.chi.evaluate(s / hole.radius, phi);
        value = std::polar(f, hole.sgn * phi + hole.chi.beta + chi) * rewrap;
        assigned = true;
        break;
      }
      if (!assigned) {
        if (r <= tip_radius) {
          // sector harmonic extension decays like (r/rho)^(2 pi n / alpha)
          const double decay = std::pow(r / tip_radius, kTwoPi / cone.alpha);
          const double chi =
              tip_chi.evaluate(decay, kTwoPi * theta / cone.alpha);
          value = core_value(r, k) * std::polar(1.0, tip_chi.beta + chi);
        } else {
          value = exterior_value(cmap, cone, r, theta);
        }
      }
      out.at(i, k) = value;
    }
  }

  const BoundaryData bc = canonical_boundary(dbar, grid);
  for (int k = 0; k < grid.n_theta(); ++k) {
    out.at(grid.n_r() - 1, k) = bc.profile[k];
  }

  if (info) {
    info->tip_hole_radius = tip_radius;
    info->hole_radii.clear();
    for (const Hole& hole : holes) info->hole_radii.push_back(hole.radius);
    info->margins_reduced = reduced;
    info->blend_energy = tip_chi.extension_energy();
    for (const Hole& hole : holes) {
      info->blend_energy += hole.chi.extension_energy();
    }
  }
  return out;
}

// --- direct evaluation of the renormalized energy ----------------------------

double direct_w_estimate(const VortexConfig& config, const ConeParams& cone,
                         const BoundaryFlux& flux,
                         const std::vector<double>& etas, int n_quad_r,
                         int n_quad_theta) {
  if (!flux.is_constant()) {
    throw std::invalid_argument(
        "direct_w_estimate: implemented for the canonical (constant) flux");
  }
  if (etas.size() < 2) {
    throw std::invalid_argument("direct_w_estimate: need at least 2 etas");
  }
  const CanonicalMap cmap = canonical_map(config);
  const double b = kTwoPi / cone.alpha;
  const double m = m_closed(config.dbar, cone);

  std::vector<ConePoint> centers;
  for (const cplx& zj : cmap.zs) {
    if (std::abs(zj) < 1e-9) continue;
    const cplx bj = disc_to_sector(zj, cone);
    centers.push_back(make_cone_point(std::abs(bj), std::arg(bj), cone));
  }

  auto density = [&](double r, double theta) {
    // |grad v|^2 = |sgn G'(zhat) + 1/zhat|^2 with G = log F(z(zhat))
    const cplx zhat = std::polar(r, theta);
    const cplx z = std::polar(std::pow(r, b), b * theta);
    const cplx gprime =
        static_cast<double>(cmap.sgn) * cmap.log_deriv(z) * b * z / zhat;
    return 0.5 * std::norm(gprime + 1.0 / zhat);
  };

  std::vector<double> west;
  for (double eta : etas) {
    const double dr = (1.0 - eta) / n_quad_r;
    const double dt = cone.alpha / n_quad_theta;
    const double diag = 0.5 * std::hypot(dr, dt);  // conservative at r <= 1
    double acc = 0.0;
    for (int i = 0; i < n_quad_r; ++i) {
      const double rm = eta + (i + 0.5) * dr;
      for (int k = 0; k < n_quad_theta; ++k) {
        const double tm = (k + 0.5) * dt;
        const ConePoint x = make_cone_point(rm, tm, cone);
        double dmin = 1e18;
        for (const ConePoint& c : centers) {
          dmin = std::min(dmin, geodesic_distance(x, c, cone));
        }
        if (dmin > eta + diag) {
          acc += density(rm, tm) * rm * dr * dt;
        } else if (dmin >= eta - diag) {
          // straddles a ball boundary: subdivide
          const int sub = 16;
          for (int a = 0; a < sub; ++a) {
            for (int c2 = 0; c2 < sub; ++c2) {
              const double rs = rm + dr * ((a + 0.5) / sub - 0.5);
              const double ts = tm + dt * ((c2 + 0.5) / sub - 0.5);
              const ConePoint xs = make_cone_point(rs, ts, cone);
              double ds = 1e18;
              for (const ConePoint& c : centers) {
                ds = std::min(ds, geodesic_distance(xs, c, cone));
              }
              if (ds > eta) {
                acc += density(rs, ts) * rs * dr * dt / (sub * sub);
              }
            }
          }
        }
      }
    }
    west.push_back(acc - kPi * m * std::log(1.0 / eta));
  }

  const std::size_t n = west.size();
  if (n == 2) return 2.0 * west[1] - west[0];
  const double a = west[n - 3], bb = west[n - 2], c = west[n - 1];
  const double den = (c - bb) - (bb - a);
  return (std::fabs(den) > 1e-14) ? c - (c - bb) * (c - bb) / den : c;
}

}  // namespace conegl
