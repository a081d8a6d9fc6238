// Acceptance suite: one pass/fail line per criterion. Exit code = number of
// failed criteria. The energy-expansion matrix (criteria 6-9) is computed
// once and shared; progress goes to stderr.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "conegl/balls.hpp"
#include "conegl/degree_cost.hpp"
#include "conegl/errors.hpp"
#include "conegl/minimizer.hpp"
#include "conegl/renorm.hpp"
#include "conegl/vortex.hpp"

using namespace conegl;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", id,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void progress(const std::string& msg) {
  std::fprintf(stderr, "  .. %s\n", msg.c_str());
  std::fflush(stderr);
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

// ---------------------------------------------------------------- criterion 1

void criterion_1() {
  double worst = 0.0;
  for (int d = -8; d <= 8; ++d) {
    for (int ia = 0; ia < 50; ++ia) {
      const double alpha = 0.05 + (kTwoPi - 0.1) * ia / 49.0;
      const ConeParams cone(alpha);
      worst = std::max(
          worst, std::fabs(m_closed(d, cone) - m_bruteforce(d, cone).cost));
    }
  }
  double branch_gap = 0.0;
  const double athr = kTwoPi / 3.0;
  for (int d = -8; d <= 0; ++d) {
    const double b1 =
        std::abs(d) + (athr - kTwoPi) * (athr - kTwoPi) / (kTwoPi * athr);
    const double b2 = std::abs(d - 1) + athr / kTwoPi;
    branch_gap = std::max(branch_gap, std::fabs(b1 - b2));
  }
  report(1, "m-oracle equivalence and branch continuity",
         worst <= 1e-12 && branch_gap < 1e-12,
         fmt("max |closed - brute| = %.2e, continuity gap = %.2e", worst,
             branch_gap));
}

// ---------------------------------------------------------------- criterion 2

void criterion_2() {
  std::mt19937_64 rng(20240811);
  std::uniform_int_distribution<int> ud(-6, 6);
  std::uniform_int_distribution<int> ulen(1, 6);
  std::uniform_real_distribution<double> ua(0.05, kTwoPi - 0.05);
  int bad = 0;
  for (int n = 0; n < 10000; ++n) {
    const ConeParams cone(ua(rng));
    const int len = ulen(rng);
    std::vector<int> split(len);
    int dbar = 0;
    for (int& s : split) {
      s = ud(rng);
      dbar += s;
    }
    if (!additivity_check(dbar, split, cone)) ++bad;
  }
  report(2, "degree-cost additivity on 10^4 random splits", bad == 0,
         fmt("%d violations", bad));
}

// ---------------------------------------------------------------- criterion 3

void criterion_3() {
  int bad = 0;
  for (double alpha : {kPi / 2.0, kPi, 3.0 * kPi / 2.0}) {
    const ConeParams cone(alpha);
    const SectorGrid g(cone, 32, 128, 0.05);
    for (int k = -3; k <= 3; ++k) {
      const double coef = k * kTwoPi / alpha + 1.0;
      TangentField f(g);
      for (int i = 0; i < g.n_r(); ++i) {
        for (int kk = 0; kk < g.n_theta(); ++kk) {
          f.at(i, kk) = std::polar(1.0, coef * g.angle(kk));
        }
      }
      for (int i : {0, 15, 31}) {
        if (degree(f, i) != k + 1) ++bad;
      }
    }
  }
  report(3, "cone-degree integrality with the frame correction", bad == 0,
         fmt("%d mismatches over k in [-3,3], three alphas", bad));
}

// ---------------------------------------------------------------- criterion 4

bool point_covered(const ConePoint& x, const std::vector<Ball>& balls,
                   const ConeParams& cone, double slack) {
  for (const Ball& b : balls) {
    const double d = b.is_tip() ? x.r : geodesic_distance(x, b.center, cone);
    if (d <= b.radius + slack) return true;
  }
  return false;
}

void criterion_4() {
  int bad = 0;
  std::string detail;

  for (double alpha : {kPi / 3.0, kPi / 2.0, kPi, 3.0 * kPi / 2.0}) {
    const ConeParams cone(alpha);
    std::mt19937_64 seeder(static_cast<std::uint64_t>(alpha * 1e6));
    for (int trial = 0; trial < 100; ++trial) {
      const BallFamily fam = random_admissible_family(cone, 4, seeder());
      const double r0 = fam.total_radius();
      const double t_final = std::log(0.6 / r0);
      const GrowthTrajectory traj = grow(fam, t_final);
      std::mt19937_64 rng(trial);
      std::uniform_real_distribution<double> uu(-1.0, 1.0);

      long deg0 = 0;
      for (const Ball& b : fam.balls) deg0 += b.degree;

      for (std::size_t j = 0; j + 1 < traj.snapshots.size(); ++j) {
        const GrowthSnapshot& now = traj.snapshots[j];
        const GrowthSnapshot& later = traj.snapshots[j + 1];
        const double dt = later.time - now.time;

        // exponential radius sums between events
        if (dt > 1e-12) {
          const double tm = now.time + 0.5 * dt;
          double ra = 0.0, rb = 0.0;
          for (const Ball& b : traj.balls_at(now.time + 1e-13)) ra += b.radius;
          for (const Ball& b : traj.balls_at(tm)) rb += b.radius;
          if (std::fabs(rb - std::exp(tm - now.time) * ra) > 1e-9 * rb) ++bad;
        }

        // nesting, point-sampled
        int checked = 0;
        for (int q = 0; q < 1000 && checked < 10; ++q) {
          const Ball& b = now.balls[q % now.balls.size()];
          const double rr = b.radius * std::sqrt(std::fabs(uu(rng)));
          const double ang = kPi * uu(rng);
          ConePoint x;
          if (b.is_tip()) {
            x = make_cone_point(std::min(rr, 1.0), alpha * 0.5 * (1 + uu(rng)),
                                cone);
          } else {
            const double cx = b.center.r + rr * std::cos(ang);
            const double cy = rr * std::sin(ang);
            const double pr = std::hypot(cx, cy);
            if (pr > 1.0) continue;
            x = make_cone_point(pr, b.center.theta + std::atan2(cy, cx), cone);
          }
          if (!point_covered(x, later.balls, cone, 1e-7)) ++bad;
          ++checked;
        }

        long deg = 0;
        for (const Ball& b : later.balls) deg += b.degree;
        if (deg != deg0) ++bad;
      }

      // radius-sum bounds at sampled times
      std::uniform_real_distribution<double> ut(0.0, t_final);
      for (int q = 0; q < 5; ++q) {
        const double t = ut(rng);
        double rt = 0.0;
        for (const Ball& b : traj.balls_at(t)) rt += b.radius;
        if (rt < std::exp(t) * r0 * (1.0 - 1e-9) ||
            rt > (1.0 + kTwoPi / alpha) * std::exp(t) * r0 * (1.0 + 1e-9)) {
          ++bad;
        }
      }
    }
  }

  // figure scenarios, exact at the bisected touch times
  const ConeParams cone(kPi);
  {
    const double r0 = 0.02, r1 = 0.03;
    BallFamily fam({Ball{ConePoint{0.0, 0.0}, 0.001, 0},
                    Ball{ConePoint{0.35, 1.2}, r0, 1},
                    Ball{ConePoint{0.55, 1.2}, r1, 1}},
                   cone);
    const double t0 = std::log(0.2 / (r0 + r1));
    const GrowthTrajectory traj = grow(fam, t0 + 0.05);
    double merged = 0.0;
    for (const Ball& b : traj.snapshots[1].balls) {
      if (!b.is_tip()) merged = std::max(merged, b.radius);
    }
    if (std::fabs(merged - std::exp(t0) * (r0 + r1)) > 1e-8) {
      ++bad;
      detail += " fig1";
    }
  }
  {
    const double r0 = 0.03, r1 = 0.04, a = 0.3;
    BallFamily fam({Ball{ConePoint{0.0, 0.0}, r0, 1},
                    Ball{ConePoint{a, 0.7}, r1, -1}},
                   cone);
    const double t0 = std::log(a / (r0 + r1));
    const GrowthTrajectory traj = grow(fam, t0 + 0.05);
    const std::vector<Ball>& after = traj.snapshots[1].balls;
    if (after.size() != 1 || !after[0].is_tip() ||
        std::fabs(after[0].radius - std::exp(t0) * (r0 + 2.0 * r1)) > 1e-8) {
      ++bad;
      detail += " fig2";
    }
  }
  {
    const double r0 = 0.04, r1 = 0.02, r2 = 0.03, s = 2.0;
    const double a = s * (r0 + r1);
    const double b = a + s * (r1 + r2);
    BallFamily fam({Ball{ConePoint{0.0, 0.0}, r0, 1},
                    Ball{ConePoint{a, 0.9}, r1, 1},
                    Ball{ConePoint{b, 0.9}, r2, -1}},
                   cone);
    const GrowthTrajectory traj = grow(fam, std::log(s) + 0.1);
    const std::vector<Ball>& after = traj.snapshots[1].balls;
    if (after.size() != 1 ||
        std::fabs(after[0].radius - s * (r0 + 2.0 * r1 + 2.0 * r2)) > 1e-7) {
      ++bad;
      detail += " fig3";
    }
  }

  report(4, "ball growth invariants and figure scenarios", bad == 0,
         fmt("%d violations%s", bad, detail.c_str()));
}

// ---------------------------------------------------------------- criterion 5

void criterion_5() {
  BoundaryFlux wavy;
  wavy.cos_coef = {0.3};
  wavy.sin_coef = {0.0, 0.1};

  double worst_oracle = 0.0, worst_flux = 0.0, worst_norm = 0.0,
         worst_fourier = 0.0;

  {
    const GreensFunction g(BoundaryFlux::constant());
    for (const cplx z : {cplx{0.3, 0.2}, cplx{-0.7, 0.1}, cplx{0.0, 0.9}}) {
      worst_oracle = std::max(
          worst_oracle,
          std::fabs(g.evaluate(z, cplx{0.0, 0.0}) - std::log(std::abs(z))));
    }
    for (const cplx p : {cplx{0.5, 0.0}, cplx{0.1, -0.6}}) {
      worst_oracle = std::max(
          worst_oracle,
          std::fabs(g.regular_part(p, p) - std::log(1.0 - std::norm(p))));
    }
  }

  for (const BoundaryFlux& flux : {BoundaryFlux::constant(), wavy}) {
    const GreensFunction g(flux);
    const cplx p{0.31, 0.22};
    const double rho = 0.05;
    const int M = 512;
    double circ = 0.0;
    const double hstep = 1e-6;
    for (int j = 0; j < M; ++j) {
      const cplx nu = std::polar(1.0, kTwoPi * j / M);
      const cplx z = p + rho * nu;
      circ += (g.evaluate(z + hstep * nu, p) - g.evaluate(z - hstep * nu, p)) /
              (2.0 * hstep) * (kTwoPi * rho / M);
    }
    worst_flux = std::max(worst_flux, std::fabs(circ - kTwoPi) / kTwoPi);

    for (const cplx q : {cplx{0.0, 0.0}, cplx{0.4, -0.3}, cplx{-0.6, 0.1}}) {
      const int N = 2048;
      double acc = 0.0;
      for (int j = 0; j < N; ++j) {
        const double t = kTwoPi * j / N;
        acc += g.evaluate(std::polar(1.0, t), q) * flux.evaluate(t) *
               (kTwoPi / N);
      }
      worst_norm = std::max(worst_norm, std::fabs(acc));
    }
  }

  {
    const GreensFunction g(wavy);
    const cplx p{0.3, 0.2};
    const int M = 1024;
    std::vector<double> dnu(M);
    const double h = 1e-5;
    for (int j = 0; j < M; ++j) {
      const cplx nu = std::polar(1.0, kTwoPi * j / M);
      const double g0 = g.evaluate(nu, p);
      const double g1 = g.evaluate((1.0 - h) * nu, p);
      const double g2 = g.evaluate((1.0 - 2.0 * h) * nu, p);
      dnu[j] = (3.0 * g0 - 4.0 * g1 + g2) / (2.0 * h);
    }
    double err2 = 0.0;
    for (int n = 0; n <= 128; ++n) {
      double ac = 0.0, as = 0.0;
      for (int j = 0; j < M; ++j) {
        const double t = kTwoPi * j / M;
        const double diff = dnu[j] - wavy.evaluate(t);
        ac += diff * std::cos(n * t);
        as += diff * std::sin(n * t);
      }
      ac /= M;
      as /= M;
      err2 += (n == 0 ? 1.0 : 2.0) * (ac * ac + as * as);
    }
    worst_fourier = std::sqrt(err2);
  }

  report(5, "Neumann Green's function: flux, boundary data, normalization",
         worst_oracle < 1e-10 && worst_flux < 0.01 && worst_norm < 1e-8 &&
             worst_fourier < 1e-3,
         fmt("oracle %.1e, flux %.2e, normalization %.1e, Fourier %.1e",
             worst_oracle, worst_flux, worst_norm, worst_fourier));
}

// ------------------------------------------------------- criteria 6, 7, 8, 9

struct MatrixRun {
  double eps = 0.0;
  double energy = 0.0;
  double test_field_energy = 0.0;
  bool test_field_built = false;
  VortexSet vortices;
  double tip_min_modulus = 1.0;
  double ledger = 0.0;
  bool ledger_ok = false;
};

struct MatrixCell {
  int dbar = 0;
  double alpha = 0.0;
  double w_cone_radius = -1.0;  // W-minimizing radius mapped through P
  std::vector<MatrixRun> runs;
};

std::vector<MatrixCell> run_matrix() {
  const std::vector<double> alphas = {kPi / 2.0, kPi, 3.0 * kPi / 2.0};
  const std::vector<double> epsilons = {0.1, 0.07, 0.05, 0.035};
  std::vector<MatrixCell> cells;
  for (int dbar : {0, 1, 2}) {
    for (double alpha : alphas) {
      MatrixCell cell;
      cell.dbar = dbar;
      cell.alpha = alpha;
      const ConeParams cone(alpha);
      const SectorGrid grid(cone, 192, 384, 3e-4);
      const BoundaryData bc = canonical_boundary(dbar, grid);
      const BoundaryFlux flux = BoundaryFlux::constant();
      const int caseno = select_case(dbar, cone);
      const int K = (caseno == 1)   ? std::abs(dbar - 1)
                    : (caseno == 2) ? std::abs(dbar)
                                    : 0;
      const VortexConfig wconfig =
          minimize_W(dbar, cone, flux, K, MinimizeWOptions{});
      for (const cplx& z : wconfig.disc_positions) {
        if (std::abs(z) > 1e-9) {
          cell.w_cone_radius = std::pow(std::abs(z), cone.beta());
        }
      }
      SolverOptions sopts;
      sopts.max_iters = 60000;
      sopts.grad_tol = 1e-6;
      sopts.seed = 101;

      for (double eps : epsilons) {
        const auto t0 = std::chrono::steady_clock::now();
        MatrixRun run;
        run.eps = eps;
        TangentField init(grid);
        try {
          init = build_test_field(dbar, cone, eps, wconfig, grid, nullptr);
          run.test_field_built = true;
          run.test_field_energy = gl_energy(init, eps).total;
        } catch (const OverlappingExcisions&) {
          init = ramp_initial_field(bc, grid, sopts);
        }
        const MinimizeResult res = minimize(init, bc, eps, sopts);
        run.energy = res.energy.total;
        run.vortices = detect_vortices(res.field, eps);
        const double band = 3.0 * std::sqrt(eps);
        for (int i = 0; i < grid.n_r() && grid.radius(i) < band; ++i) {
          for (int k = 0; k < grid.n_theta(); ++k) {
            run.tip_min_modulus =
                std::min(run.tip_min_modulus, std::abs(res.field.at(i, k)));
          }
        }
        try {
          const BallFamily family = bad_set_family(res.field, eps);
          const double t_final =
              std::max(0.0, std::log(0.25 / family.total_radius()));
          run.ledger = lower_bound_ledger(grow(family, t_final), cone);
          run.ledger_ok = true;
        } catch (const NumericalError&) {
          run.ledger_ok = false;
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          t0)
                .count();
        progress(fmt("matrix dbar=%d alpha=%.4f eps=%.3f: E=%.5f iters=%d "
                     "tip=%d off=%zu (%.1fs)",
                     dbar, alpha, eps, run.energy, res.diagnostics.iterations,
                     run.vortices.tip_degree, run.vortices.vortices.size(),
                     secs));
        cell.runs.push_back(std::move(run));
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

void criterion_6(const std::vector<MatrixCell>& cells) {
  bool pass = true;
  std::string detail;
  for (const MatrixCell& cell : cells) {
    std::vector<std::pair<double, double>> runs;
    for (const MatrixRun& r : cell.runs) runs.push_back({r.eps, r.energy});
    const ExpansionFit fit = fit_expansion(runs);
    const double target = kPi * m_closed(cell.dbar, ConeParams(cell.alpha));
    const double rel = std::fabs(fit.slope - target) / target;
    if (rel > 0.10) pass = false;
    detail += fmt("%s[d=%d a=%.2f %.1f%%]", detail.empty() ? "" : " ",
                  cell.dbar, cell.alpha, 100.0 * rel);
  }
  report(6, "energy-expansion slope within 10% of pi m(d, alpha)", pass,
         detail);
}

void criterion_7(const std::vector<MatrixCell>& cells) {
  int bad = 0;
  std::string detail;
  for (const MatrixCell& cell : cells) {
    const bool tip_zero = (cell.dbar <= 0 && cell.alpha > kTwoPi / 3.0);
    const int expected_tip = tip_zero ? 0 : 1;
    for (const MatrixRun& r : cell.runs) {
      bool ok = r.vortices.tip_degree == expected_tip;
      for (const DetectedVortex& v : r.vortices.vortices) {
        if (v.degree != 1 && v.degree != -1) ok = false;
      }
      if (static_cast<int>(r.vortices.vortices.size()) >
          std::abs(cell.dbar) + 1) {
        ok = false;
      }
      if (!(r.tip_min_modulus < 0.2)) ok = false;
      if (!ok) {
        ++bad;
        detail += fmt(" [d=%d a=%.2f eps=%.2f tip=%d K=%zu m=%.2f]", cell.dbar,
                      cell.alpha, r.eps, r.vortices.tip_degree,
                      r.vortices.vortices.size(), r.tip_min_modulus);
      }
    }
  }
  report(7, "degree dichotomy, unit off-tip degrees, tip vanishing", bad == 0,
         bad == 0 ? "all 36 runs"
                  : fmt("%d failing runs:%s", bad, detail.c_str()));
}

void criterion_8(const std::vector<MatrixCell>& cells) {
  int bad = 0;
  std::string detail;
  for (const MatrixCell& cell : cells) {
    for (const MatrixRun& r : cell.runs) {
      bool ok = r.test_field_built && r.test_field_energy >= r.energy - 1e-6;
      if (!r.ledger_ok || r.ledger > r.energy + 1e-9) ok = false;
      if (!ok) {
        ++bad;
        detail += fmt(" [d=%d a=%.2f eps=%.2f V=%d E_V=%.4f E=%.4f led=%.4f]",
                      cell.dbar, cell.alpha, r.eps, (int)r.test_field_built,
                      r.test_field_energy, r.energy, r.ledger);
      }
    }
  }
  report(8, "upper/lower sandwich: E(V) >= E(u) and ledger <= E(u)", bad == 0,
         bad == 0 ? "all 36 runs"
                  : fmt("%d failing runs:%s", bad, detail.c_str()));
}

void criterion_9(const std::vector<MatrixCell>& cells) {
  const ConeParams cone(kPi);
  const BoundaryFlux flux = BoundaryFlux::constant();

  const double rho_star = std::sqrt(3.0 / 7.0);
  const VortexConfig cfg =
      make_config(2, cone, {std::polar(rho_star, cone.alpha / 2.0)});
  const double w_formula = renormalized_energy(cfg, cone, flux);
  const double w_direct =
      direct_w_estimate(cfg, cone, flux, {0.1, 0.05, 0.025}, 512, 768);
  const double rel_w = std::fabs(w_direct - w_formula) / std::fabs(w_formula);

  const VortexConfig wmin = minimize_W(2, cone, flux, 1, MinimizeWOptions{});
  const double radius_err =
      std::fabs(std::abs(wmin.disc_positions[0]) - rho_star);

  double det_err = 1e9;
  for (const MatrixCell& cell : cells) {
    if (cell.dbar != 2 || std::fabs(cell.alpha - kPi) > 1e-12) continue;
    const MatrixRun& r = cell.runs.back();  // eps = 0.035
    for (const DetectedVortex& v : r.vortices.vortices) {
      det_err =
          std::min(det_err, std::fabs(v.position.r - cell.w_cone_radius));
    }
  }

  report(9, "renormalized-energy consistency and vortex placement",
         rel_w <= 0.03 && radius_err <= 1e-4 && det_err <= 0.1,
         fmt("W direct vs formula %.2f%%, |rho - sqrt(3/7)| = %.1e, "
             "position gap %.3f",
             100.0 * rel_w, radius_err, det_err));
}

// ---------------------------------------------------------------- criterion 10

void criterion_10() {
  const ConeParams cone(kPi);
  CoreOptions copts;
  copts.n_r = 256;
  copts.n_theta = 64;
  copts.solver.max_iters = 40000;
  copts.solver.grad_tol = 1e-6;

  double worst_scaling = 0.0;
  for (int which : {1, 2}) {
    const double a = solve_core_mu(which, 0.1, 1.0, cone, copts).value;
    const double b = solve_core_mu(which, 0.05, 0.5, cone, copts).value;
    worst_scaling = std::max(worst_scaling, std::fabs(a - b) / a);
  }
  progress(fmt("scaling law max deviation %.2e", worst_scaling));

  const double g1 = gamma_radial(0.1);
  const double g2 = gamma_radial(0.05);
  const double g3 = gamma_radial(0.025);
  const bool gamma_ok = std::fabs(g2 - g3) < std::fabs(g1 - g2) && g3 > 0.0;
  progress(fmt("gamma sequence %.5f %.5f %.5f", g1, g2, g3));

  bool gamma0_ok = true;
  std::string g0_detail;
  for (int dbar : {0, 2}) {
    try {
      const Gamma0Result res = gamma0(dbar, cone, {0.2, 0.1, 0.05}, copts);
      g0_detail += fmt(" gamma0(%d, pi) = %.4f +- %.4f (mu_%d)", dbar,
                       res.value, res.error_estimate, res.which);
    } catch (const NotConverged&) {
      gamma0_ok = false;
      g0_detail += fmt(" gamma0(%d, pi) failed to stabilize", dbar);
    }
  }

  report(10, "core-energy scaling law and stabilization",
         worst_scaling <= 0.02 && gamma_ok && gamma0_ok,
         fmt("scaling %.2e; gamma increments %.4f -> %.4f;%s", worst_scaling,
             std::fabs(g1 - g2), std::fabs(g2 - g3), g0_detail.c_str()));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();

  progress("running the 3 x 3 x 4 minimization matrix (several minutes)");
  const std::vector<MatrixCell> cells = run_matrix();
  criterion_6(cells);
  criterion_7(cells);
  criterion_8(cells);
  criterion_9(cells);
  criterion_10();

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::printf("%d of 10 criteria failed (%.0f s total)\n", g_failures, secs);
  return g_failures;
}
