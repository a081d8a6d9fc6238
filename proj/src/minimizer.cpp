#include "conegl/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "conegl/errors.hpp"

namespace conegl {

BoundaryData canonical_boundary(int dbar, const SectorGrid& grid) {
  const double coef = (dbar - 1.0) * kTwoPi / grid.cone().alpha + 1.0;
  BoundaryData bc;
  bc.dbar = dbar;
  bc.profile.resize(grid.n_theta());
  for (int k = 0; k < grid.n_theta(); ++k) {
    bc.profile[k] = std::polar(1.0, coef * grid.angle(k));
  }
  return bc;
}

TangentField ramp_initial_field(const BoundaryData& bc, const SectorGrid& grid,
                                const SolverOptions& opts) {
  if (static_cast<int>(bc.profile.size()) != grid.n_theta()) {
    throw std::invalid_argument("ramp_initial_field: profile size mismatch");
  }
  TangentField f(grid);
  const double span = 1.0 - grid.r_min();
  for (int i = 0; i < grid.n_r(); ++i) {
    const double ramp = 0.1 + 0.9 * (grid.radius(i) - grid.r_min()) / span;
    for (int k = 0; k < grid.n_theta(); ++k) {
      f.at(i, k) = ramp * bc.profile[k];
    }
  }
  if (opts.init_noise > 0.0) {
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < grid.n_r() - 1; ++i) {
      for (int k = 0; k < grid.n_theta(); ++k) {
        f.at(i, k) += opts.init_noise * cplx{u(rng), u(rng)};
      }
    }
  }
  for (int k = 0; k < grid.n_theta(); ++k) {
    f.at(grid.n_r() - 1, k) = bc.profile[k];
  }
  return f;
}

namespace {

// Fixed diagonal preconditioner: incident Dirichlet edge weights plus a
// bound on the potential curvature. Tames the 1/r^2 stiffness near the tip.
std::vector<double> build_preconditioner(const SectorGrid& g, double epsilon) {
  const int nr = g.n_r();
  const int nt = g.n_theta();
  const double dr = g.dr();
  const double dth = g.dtheta();
  std::vector<double> d(g.size(), 0.0);
  for (int i = 0; i < nr; ++i) {
    const double r = g.radius(i);
    const double rho = g.radial_weight(i);
    const double wt = rho * dr / (r * dth);
    const double wp = r * rho * dr * dth;
    double diag = 2.0 * wt + 3.0 * wp / (epsilon * epsilon);
    if (i > 0) diag += (g.radius(i - 1) + 0.5 * dr) * dth / dr;
    if (i + 1 < nr) diag += (r + 0.5 * dr) * dth / dr;
    for (int k = 0; k < nt; ++k) d[g.index(i, k)] = diag;
  }
  return d;
}

struct GradState {
  double energy = 0.0;
  std::vector<cplx> grad;
  double grad_norm2 = 0.0;  // sum |g|^2 / D
};

void project_boundary(const SectorGrid& g, std::vector<cplx>& grad) {
  const int base = (g.n_r() - 1) * g.n_theta();
  for (int k = 0; k < g.n_theta(); ++k) grad[base + k] = cplx{0.0, 0.0};
}

void eval_state(TangentField& f, double epsilon,
                const std::vector<double>& precond, GradState& st) {
  st.energy = gl_energy_and_gradient(f, epsilon, &st.grad);
  project_boundary(f.grid(), st.grad);
  double n2 = 0.0;
  for (std::size_t j = 0; j < st.grad.size(); ++j) {
    n2 += std::norm(st.grad[j]) / precond[j];
  }
  st.grad_norm2 = n2;
}

}  // namespace

MinimizeResult minimize(const TangentField& init, const BoundaryData& bc,
                        double epsilon, const SolverOptions& opts) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("minimize: epsilon <= 0");
  if (opts.max_iters < 1 || !(opts.grad_tol > 0.0)) {
    throw std::invalid_argument("minimize: bad solver options");
  }
  const SectorGrid& g = init.grid();
  if (static_cast<int>(bc.profile.size()) != g.n_theta()) {
    throw std::invalid_argument("minimize: boundary profile size mismatch");
  }
  const bool ncg = (opts.step_rule == "ncg");
  if (!ncg && opts.step_rule != "bb") {
    throw std::invalid_argument("minimize: unknown step_rule " + opts.step_rule);
  }

  TangentField u = init;
  for (int k = 0; k < g.n_theta(); ++k) {
    u.at(g.n_r() - 1, k) = bc.profile[k];
  }
  if (!u.all_finite()) throw NanDivergence("minimize: non-finite initial field");

  const std::vector<double> precond = build_preconditioner(g, epsilon);
  const int n = g.size();

  GradState cur;
  eval_state(u, epsilon, precond, cur);
  if (!std::isfinite(cur.energy)) {
    throw NanDivergence("minimize: non-finite initial energy");
  }
  // The preconditioned gradient norm scales like sqrt(energy); dividing by
  // sqrt(max(1, E)) makes grad_tol a suboptimality measure independent of
  // how rough the initial iterate is.
  auto rel_norm = [](const GradState& st) {
    return std::sqrt(st.grad_norm2 / std::max(1.0, std::fabs(st.energy)));
  };

  Diagnostics diag;
  diag.history.push_back(IterRecord{0, cur.energy, std::sqrt(cur.grad_norm2)});

  TangentField trial(g);
  std::vector<cplx> dir(n);         // descent direction (preconditioned)
  std::vector<cplx> prev_grad;      // for BB / NCG updates
  std::vector<cplx> prev_dir;
  double step = 1.0;
  int it = 0;
  bool converged = rel_norm(cur) <= opts.grad_tol;

  for (it = 0; it < opts.max_iters && !converged; ++it) {
    // Direction.
    double dir_slope = 0.0;  // Re<g, dir>, must be positive for descent -dir
    if (!ncg || prev_grad.empty()) {
      for (int j = 0; j < n; ++j) dir[j] = cur.grad[j] / precond[j];
      dir_slope = cur.grad_norm2;
    } else {
      double num = 0.0, den = 0.0;
      for (int j = 0; j < n; ++j) {
        num += (std::norm(cur.grad[j]) -
                (cur.grad[j].real() * prev_grad[j].real() +
                 cur.grad[j].imag() * prev_grad[j].imag())) /
               precond[j];
        den += std::norm(prev_grad[j]) / precond[j];
      }
      const double beta = std::max(0.0, den > 0.0 ? num / den : 0.0);
      dir_slope = 0.0;
      for (int j = 0; j < n; ++j) {
        dir[j] = cur.grad[j] / precond[j] + beta * prev_dir[j];
        dir_slope += cur.grad[j].real() * dir[j].real() +
                     cur.grad[j].imag() * dir[j].imag();
      }
      if (dir_slope <= 0.0) {  // restart on a non-descent direction
        for (int j = 0; j < n; ++j) dir[j] = cur.grad[j] / precond[j];
        dir_slope = cur.grad_norm2;
      }
    }

    // Armijo backtracking from the BB (or carried) step. The displacement
    // cap keeps aggressive BB steps from hopping out of the initial basin
    // (large metastable rearrangements must come from genuine instability,
    // not from a single long step).
    double tau = std::clamp(step, 1e-12, 1e6);
    if (opts.max_move > 0.0) {
      double dmax = 0.0;
      for (int j = 0; j < n; ++j) dmax = std::max(dmax, std::abs(dir[j]));
      if (tau * dmax > opts.max_move) tau = opts.max_move / dmax;
    }
    bool accepted = false;
    double trial_energy = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      for (int j = 0; j < n; ++j) trial.values()[j] = u.values()[j] - tau * dir[j];
      trial_energy = gl_energy_and_gradient(trial, epsilon, nullptr);
      if (std::isfinite(trial_energy) &&
          trial_energy <= cur.energy - 1e-4 * tau * dir_slope) {
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    if (!accepted) break;  // numerically stagnant

    GradState next;
    std::swap(next.grad, prev_grad);  // reuse storage
    eval_state(trial, epsilon, precond, next);
    if (!std::isfinite(next.energy)) {
      throw NanDivergence("minimize: energy became non-finite");
    }

    // BB1 step in the preconditioner metric.
    double sDs = 0.0, sy = 0.0;
    for (int j = 0; j < n; ++j) {
      const cplx s = trial.values()[j] - u.values()[j];
      const cplx y = next.grad[j] - cur.grad[j];
      sDs += precond[j] * std::norm(s);
      sy += s.real() * y.real() + s.imag() * y.imag();
    }
    step = (sy > 1e-300) ? sDs / sy : tau * 2.0;

    if (ncg) prev_dir = dir;
    prev_grad = std::move(cur.grad);
    cur.grad = std::move(next.grad);
    cur.energy = next.energy;
    cur.grad_norm2 = next.grad_norm2;
    std::swap(u.values(), trial.values());

    if ((it + 1) % opts.history_stride == 0) {
      diag.history.push_back(
          IterRecord{it + 1, cur.energy, std::sqrt(cur.grad_norm2)});
    }
    if (rel_norm(cur) <= opts.grad_tol) converged = true;
  }

  diag.iterations = it;
  diag.converged = converged;
  diag.grad_norm_abs = std::sqrt(cur.grad_norm2);
  diag.grad_norm_rel = rel_norm(cur);
  if (diag.history.empty() || diag.history.back().iteration != it) {
    diag.history.push_back(IterRecord{it, cur.energy, diag.grad_norm_abs});
  }

  MinimizeResult res{std::move(u), EnergyBreakdown{}, std::move(diag)};
  res.energy = gl_energy(res.field, epsilon);
  return res;
}

// --- sector core problems --------------------------------------------------

CoreSolution solve_core_mu(int which, double epsilon, double eta,
                           const ConeParams& cone, const CoreOptions& opts) {
  if (which != 1 && which != 2) {
    throw std::invalid_argument("solve_core_mu: which must be 1 or 2");
  }
  if (!(epsilon > 0.0) || !(epsilon < eta) || !(eta <= 1.0)) {
    throw std::invalid_argument("solve_core_mu: need 0 < epsilon < eta <= 1");
  }
  const double coef = (which == 1) ? 1.0 : 1.0 - kTwoPi / cone.alpha;
  SectorGrid grid(cone, opts.n_r, opts.n_theta, opts.r_min_frac * eta, eta);

  BoundaryData bc;
  bc.dbar = which == 1 ? 1 : 0;
  bc.profile.resize(grid.n_theta());
  for (int k = 0; k < grid.n_theta(); ++k) {
    bc.profile[k] = std::polar(1.0, coef * grid.angle(k));
  }

  TangentField init(grid);
  std::mt19937_64 rng(opts.solver.seed);
  std::uniform_real_distribution<double> un(-1.0, 1.0);
  for (int i = 0; i < grid.n_r(); ++i) {
    const double r = grid.radius(i);
    const double f = r / (r + epsilon);
    for (int k = 0; k < grid.n_theta(); ++k) {
      init.at(i, k) = f * std::polar(1.0, coef * grid.angle(k)) +
                      opts.solver.init_noise * cplx{un(rng), un(rng)};
    }
  }

  MinimizeResult res = minimize(init, bc, epsilon, opts.solver);
  return CoreSolution{res.energy.total, std::move(res.field),
                      std::move(res.diagnostics)};
}

// --- 1-D radial core ---------------------------------------------------------

RadialCore minimize_radial_core(double prefactor, double coef, double epsilon,
                                double outer, int n_nodes) {
  if (n_nodes < 100) throw std::invalid_argument("minimize_radial_core: too few nodes");
  const int N = n_nodes;
  std::vector<double> r(N + 1);
  for (int j = 0; j <= N; ++j) {
    const double s = static_cast<double>(j) / N;
    r[j] = outer * s * s;  // graded toward the origin
  }

  // Node quadrature weights (trapezoid on the graded mesh).
  std::vector<double> w(N + 1, 0.0);
  for (int j = 0; j <= N; ++j) {
    const double lo = (j == 0) ? r[0] : r[j - 1];
    const double hi = (j == N) ? r[N] : r[j + 1];
    w[j] = 0.5 * (hi - lo);
  }

  const double pot = 1.0 / (2.0 * epsilon * epsilon);
  auto energy_grad = [&](const std::vector<double>& f, std::vector<double>* gr) {
    if (gr) gr->assign(N + 1, 0.0);
    double e = 0.0;
    for (int j = 0; j < N; ++j) {
      const double dr = r[j + 1] - r[j];
      const double rm = 0.5 * (r[j] + r[j + 1]);
      const double c = prefactor * rm / dr;
      const double d = f[j + 1] - f[j];
      e += c * d * d;
      if (gr) {
        (*gr)[j + 1] += 2.0 * c * d;
        (*gr)[j] -= 2.0 * c * d;
      }
    }
    for (int j = 1; j <= N; ++j) {  // j = 0 sits at r = 0 with f = 0
      const double a = prefactor * w[j];
      const double om = 1.0 - f[j] * f[j];
      e += a * (coef * coef * f[j] * f[j] / r[j] + pot * om * om * r[j]);
      if (gr) {
        (*gr)[j] += a * (2.0 * coef * coef * f[j] / r[j] -
                         4.0 * pot * om * f[j] * r[j]);
      }
    }
    return e;
  };

  std::vector<double> f(N + 1);
  for (int j = 0; j <= N; ++j) f[j] = r[j] / (r[j] + epsilon);
  f[0] = 0.0;
  f[N] = 1.0;

  std::vector<double> diag(N + 1, 0.0);
  for (int j = 0; j < N; ++j) {
    const double c = prefactor * 0.5 * (r[j] + r[j + 1]) / (r[j + 1] - r[j]);
    diag[j] += 2.0 * c;
    diag[j + 1] += 2.0 * c;
  }
  for (int j = 1; j <= N; ++j) {
    diag[j] += prefactor * w[j] * (2.0 * coef * coef / r[j] + 8.0 * pot * r[j]);
  }

  std::vector<double> grad, trial(N + 1), gnew;
  double e = energy_grad(f, &grad);
  grad[0] = grad[N] = 0.0;
  auto pnorm2 = [&](const std::vector<double>& g) {
    double s = 0.0;
    for (int j = 1; j < N; ++j) s += g[j] * g[j] / diag[j];
    return s;
  };
  double g2 = pnorm2(grad);
  // preconditioned-norm^2 scales like energy: g2 <= 1e-14 |e| puts the
  // estimated suboptimality near 1e-14 |e|
  const double tol2 = 1e-14 * std::max(1.0, std::fabs(e));
  double step = 1.0;
  int stagnant = 0;
  for (int it = 0; it < 200000 && g2 > tol2 && stagnant < 20; ++it) {
    double tau = std::clamp(step, 1e-14, 1e8);
    bool ok = false;
    double enew = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      for (int j = 0; j <= N; ++j) trial[j] = f[j] - tau * grad[j] / diag[j];
      trial[0] = 0.0;
      trial[N] = 1.0;
      enew = energy_grad(trial, nullptr);
      if (std::isfinite(enew) && enew <= e - 1e-4 * tau * g2) {
        ok = true;
        break;
      }
      tau *= 0.5;
    }
    if (!ok) break;
    stagnant = (e - enew <= 1e-15 * std::fabs(e)) ? stagnant + 1 : 0;
    energy_grad(trial, &gnew);
    gnew[0] = gnew[N] = 0.0;
    double sDs = 0.0, sy = 0.0;
    for (int j = 1; j < N; ++j) {
      const double s = trial[j] - f[j];
      sDs += diag[j] * s * s;
      sy += s * (gnew[j] - grad[j]);
    }
    step = (sy > 1e-300) ? sDs / sy : tau * 2.0;
    f.swap(trial);
    grad.swap(gnew);
    e = enew;
    g2 = pnorm2(grad);
  }

  return RadialCore{e, std::move(r), std::move(f)};
}

double gamma_radial(double epsilon, int n_nodes) {
  if (!(epsilon > 0.0) || !(epsilon < 0.5)) {
    throw std::invalid_argument("gamma_radial: need 0 < epsilon < 0.5");
  }
  const RadialCore core = minimize_radial_core(kPi, 1.0, epsilon, 1.0, n_nodes);
  return core.value - kPi * std::log(1.0 / epsilon);
}

double mu_radial_ansatz(int which, double epsilon, double eta,
                        const ConeParams& cone, int n_nodes) {
  if (which != 1 && which != 2) {
    throw std::invalid_argument("mu_radial_ansatz: which must be 1 or 2");
  }
  const double coef = (which == 1) ? 1.0 : 1.0 - kTwoPi / cone.alpha;
  const RadialCore core =
      minimize_radial_core(0.5 * cone.alpha, coef, epsilon, eta, n_nodes);
  return core.value;
}

Gamma0Result gamma0(int dbar, const ConeParams& cone,
                    const std::vector<double>& eps_sequence,
                    const CoreOptions& opts) {
  if (eps_sequence.size() < 3) {
    throw std::invalid_argument("gamma0: need at least 3 epsilon values");
  }
  for (std::size_t k = 0; k + 1 < eps_sequence.size(); ++k) {
    if (!(eps_sequence[k + 1] < eps_sequence[k])) {
      throw std::invalid_argument("gamma0: epsilon sequence must be strictly decreasing");
    }
  }
  const bool tip_branch = (dbar <= 0 && cone.alpha > kTwoPi / 3.0);
  const int which = tip_branch ? 2 : 1;
  const double coef = (which == 1) ? 1.0 : 1.0 - kTwoPi / cone.alpha;
  const double log_coef = 0.5 * cone.alpha * coef * coef;

  Gamma0Result res;
  res.which = which;
  for (double eps : eps_sequence) {
    const CoreSolution sol = solve_core_mu(which, eps, 1.0, cone, opts);
    res.sequence.push_back(sol.value - log_coef * std::log(1.0 / eps));
  }

  const std::size_t n = res.sequence.size();
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const double d1 = std::fabs(res.sequence[k + 1] - res.sequence[k]);
    const double d2 = std::fabs(res.sequence[k + 2] - res.sequence[k + 1]);
    if (d2 > d1 + 1e-10) {
      throw NotConverged("gamma0: increments of the subtracted sequence fail to decrease");
    }
  }

  const double a = res.sequence[n - 3];
  const double b = res.sequence[n - 2];
  const double c = res.sequence[n - 1];
  const double den = (c - b) - (b - a);
  res.value = (std::fabs(den) > 1e-14) ? c - (c - b) * (c - b) / den : c;
  res.error_estimate = std::fabs(c - b);
  return res;
}

}  // namespace conegl
