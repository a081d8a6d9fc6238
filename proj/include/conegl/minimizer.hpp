#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "conegl/field.hpp"

namespace conegl {

// Dirichlet data at r = 1: one unit-modulus value per boundary node,
// seam-consistent by construction.
struct BoundaryData {
  int dbar = 0;
  std::vector<cplx> profile;  // size n_theta
};

// Degree-dbar datum g(theta) = e^{i((dbar-1)(2pi/alpha) + 1) theta}.
BoundaryData canonical_boundary(int dbar, const SectorGrid& grid);

struct SolverOptions {
  int max_iters = 20000;
  double grad_tol = 1e-6;        // relative preconditioned gradient norm
  std::string step_rule = "bb";  // "bb" or "ncg"
  std::uint64_t seed = 0;
  double init_noise = 0.01;      // amplitude of the seeded init perturbation
  double max_move = 0.5;         // per-iteration cap on max |du| at any node
  int history_stride = 50;

  bool operator==(const SolverOptions&) const = default;
};

struct IterRecord {
  int iteration = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
};

struct Diagnostics {
  int iterations = 0;
  bool converged = false;
  double grad_norm_rel = 0.0;
  double grad_norm_abs = 0.0;
  std::vector<IterRecord> history;
};

struct MinimizeResult {
  TangentField field;
  EnergyBreakdown energy;
  Diagnostics diagnostics;
};

// Minimizes the discrete Ginzburg-Landau energy over fields matching bc at
// r = 1 (boundary nodes are bit-identical to bc.profile throughout) with a
// free inner boundary. Preconditioned Barzilai-Borwein steps with an Armijo
// backtracking safeguard; energy never increases across accepted iterations.
// Non-convergence is reported through diagnostics.converged; a non-finite
// energy throws NanDivergence.
MinimizeResult minimize(const TangentField& init, const BoundaryData& bc,
                        double epsilon, const SolverOptions& opts);

// Boundary profile extended radially with a linear modulus ramp from 0.1 at
// r_min, plus a small seeded perturbation of the interior (amplitude
// opts.init_noise) so descent can leave the rotationally equivariant saddle.
TangentField ramp_initial_field(const BoundaryData& bc, const SectorGrid& grid,
                                const SolverOptions& opts);

// --- sector core problems ------------------------------------------------

struct CoreSolution {
  double value = 0.0;   // minimized sector energy I(eps, eta)
  TangentField field;   // minimizer on the grid covering [r_min_frac*eta, eta]
  Diagnostics diagnostics;
};

struct CoreOptions {
  int n_r = 256;
  int n_theta = 64;
  double r_min_frac = 1e-3;  // inner excision, scaled proportionally to eta
  SolverOptions solver;
};

// Minimal Ginzburg-Landau energy on the sector of radius eta with boundary
// profile e^{i theta} (which = 1) or e^{i(1 - 2pi/alpha) theta} (which = 2)
// at r = eta and seam periodicity.
CoreSolution solve_core_mu(int which, double epsilon, double eta,
                           const ConeParams& cone, const CoreOptions& opts);

// Radial-ansatz value of the same problem (1-D profile minimization).
double mu_radial_ansatz(int which, double epsilon, double eta,
                        const ConeParams& cone, int n_nodes = 2000);

// --- radial core problem / gamma -----------------------------------------

struct RadialCore {
  double value = 0.0;           // minimized 1-D energy
  std::vector<double> radii;    // graded mesh
  std::vector<double> profile;  // minimizing modulus f
};

// Minimum of prefactor * int (f'^2 + coef^2 f^2/r^2 + (1-f^2)^2/(2 eps^2)) r dr
// over radial profiles on [0, outer] with f(0) = 0, f(outer) = 1.
RadialCore minimize_radial_core(double prefactor, double coef, double epsilon,
                                double outer, int n_nodes);

// Core energy constant gamma(eps): minimal disc energy with e^{i theta} data
// via the radial profile problem, minus pi log(1/eps). 0 < eps < 0.5.
double gamma_radial(double epsilon, int n_nodes = 2000);

struct Gamma0Result {
  double value = 0.0;
  double error_estimate = 0.0;
  std::vector<double> sequence;  // subtracted values, one per epsilon
  int which = 1;                 // core problem used (1 or 2)
};

// Tip core energy constant gamma0(d, alpha): extrapolates the subtracted
// sequence mu_j(eps,1) - c_j log(1/eps) over a strictly decreasing epsilon
// sequence (length >= 3), with j = 2 when d <= 0 and alpha > 2pi/3, else
// j = 1. Throws NotConverged if the increments fail to decrease.
Gamma0Result gamma0(int dbar, const ConeParams& cone,
                    const std::vector<double>& eps_sequence,
                    const CoreOptions& opts);

}  // namespace conegl
