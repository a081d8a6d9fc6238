#pragma once

#include <cstdint>
#include <vector>

#include "conegl/field.hpp"
#include "conegl/minimizer.hpp"

namespace conegl {

// Neumann boundary flux on the unit circle,
//   phi(t) = 1 + sum_n (a_n cos nt + b_n sin nt),
// with the constant mode pinned to 1 (total flux 2 pi, matching the unit
// point source). For the canonical boundary data phi is identically 1.
struct BoundaryFlux {
  std::vector<double> cos_coef;  // a_1, a_2, ...
  std::vector<double> sin_coef;  // b_1, b_2, ...

  static BoundaryFlux constant() { return BoundaryFlux{}; }

  // Least-squares-free Fourier analysis of uniformly spaced samples; the
  // sample mean must equal 1 to within 1e-8.
  static BoundaryFlux from_samples(const std::vector<double>& samples,
                                   int modes = 128);

  double evaluate(double t) const;
  int modes() const {
    return static_cast<int>(std::max(cos_coef.size(), sin_coef.size()));
  }
  bool is_constant() const { return cos_coef.empty() && sin_coef.empty(); }
};

// Neumann Green's function on the unit disc:
//   G(z, p) = log|z - p| + log|1 - z conj(p)| + h(z) + c(p),
// where h matches the non-constant part of the flux through its Fourier
// series and c(p) enforces the zero-average normalization of G against phi.
class GreensFunction {
 public:
  explicit GreensFunction(BoundaryFlux flux, int quadrature_points = 2048);

  double evaluate(cplx z, cplx p) const;
  double regular_part(cplx z, cplx p) const;  // continuous across z = p
  double harmonic_correction(cplx z) const;   // h(z)
  double normalization(cplx p) const;         // c(p)
  const BoundaryFlux& flux() const { return flux_; }

 private:
  BoundaryFlux flux_;
  int quad_;
};

double neumann_green(const BoundaryFlux& flux, cplx z, cplx p);
double regular_part(const BoundaryFlux& flux, cplx z, cplx p);

// Vortex placement on the unit disc. Case 1: |dbar-1| off-origin vortices of
// degree sgn(dbar-1). Case 2: a degree -1 vortex at the origin plus |dbar|
// off-origin degree -1 vortices. Case 3 (dbar = 1): no vortices.
struct VortexConfig {
  std::vector<cplx> disc_positions;  // includes z_0 = 0 first in Case 2
  std::vector<int> degrees;
  int caseno = 1;
  int dbar = 0;
};

// Normative threshold: Case 2 iff dbar < 1 and alpha > 2 pi / 3.
int select_case(int dbar, const ConeParams& cone);

// Config with the case-optimal degrees attached to given off-origin
// positions (Case 2 inserts z_0 = 0 automatically).
VortexConfig make_config(int dbar, const ConeParams& cone,
                         const std::vector<cplx>& off_origin_positions);

// Renormalized energy W(b; d, alpha) by the closed matching formulas.
// Case 3 evaluates to the Dirichlet energy of the harmonic phase, which is
// zero for the canonical (constant-flux) data this module models.
double renormalized_energy(const VortexConfig& config, const ConeParams& cone,
                           const BoundaryFlux& flux);

// Dirichlet energy (1/2) int |grad phi|^2 of the harmonic extension of a
// boundary phase given by its Fourier coefficients.
double harmonic_phase_energy(const std::vector<double>& cos_coef,
                             const std::vector<double>& sin_coef);

struct MinimizeWOptions {
  int starts = 16;
  std::uint64_t seed = 0;
  double grad_tol = 1e-8;
  int max_iters = 4000;
};

// Multi-start descent of W over the off-origin positions. Deterministic
// given the seed; the best converged start wins (ties to the lowest start
// index). Throws NoInteriorMinimum if every start escapes to the boundary.
VortexConfig minimize_W(int dbar, const ConeParams& cone,
                        const BoundaryFlux& flux, int K,
                        const MinimizeWOptions& opts = {});

struct BuildInfo {
  double tip_hole_radius = 0.0;
  std::vector<double> hole_radii;       // off-tip holes, sector scale
  double blend_energy = 0.0;            // interpolation-layer (chi) energy
  bool margins_reduced = false;         // desk-scale shrink was applied
  double core_mu_value = 0.0;           // energy of the tip core fill-in
  std::vector<double> off_core_values;  // 1-D core energies per hole
};

// Discrete upper-bound test field V_eps on the given grid: the canonical
// harmonic field outside excised holes, radial +-1 cores in the off-tip
// holes, the mu_1/mu_2 minimizer in the tip hole. The phase mismatch chi on
// each hole boundary is carried into the hole by its harmonic extension, and
// that interpolation energy is reported separately in BuildInfo. Satisfies
// canonical_boundary(dbar) at r = 1 and the seam condition exactly.
TangentField build_test_field(int dbar, const ConeParams& cone, double epsilon,
                              const VortexConfig& config,
                              const SectorGrid& grid,
                              BuildInfo* info = nullptr);

// Direct evaluation of the renormalized-energy definition: Dirichlet energy
// of the canonical harmonic field outside radius-eta balls minus
// pi m(dbar, alpha) log(1/eta), extrapolated over the given etas.
// Supports the constant flux (canonical data).
double direct_w_estimate(const VortexConfig& config, const ConeParams& cone,
                         const BoundaryFlux& flux,
                         const std::vector<double>& etas, int n_quad_r = 768,
                         int n_quad_theta = 1024);

}  // namespace conegl
