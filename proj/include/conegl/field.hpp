#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "conegl/grid.hpp"

namespace conegl {

// Dirichlet / potential split of the Ginzburg-Landau energy
//   E = 1/2 int |grad u|^2 + 1/(4 eps^2) int (1 - |u|^2)^2.
struct EnergyBreakdown {
  double dirichlet = 0.0;
  double potential = 0.0;
  double total = 0.0;
  double epsilon = 0.0;
};

// Complex-valued field on a SectorGrid, expressed in the fixed Cartesian
// frame of the plane. Any access that crosses the seam picks up the jump
// factor e^{i alpha w}, w = signed wrap count, so the stored values always
// represent a genuine tangent field on the cone.
class TangentField {
 public:
  explicit TangentField(const SectorGrid& grid)
      : grid_(grid), values_(grid.size(), cplx{0.0, 0.0}) {}

  const SectorGrid& grid() const { return grid_; }

  cplx& at(int i, int k) { return values_[grid_.index(i, k)]; }
  const cplx& at(int i, int k) const { return values_[grid_.index(i, k)]; }

  std::vector<cplx>& values() { return values_; }
  const std::vector<cplx>& values() const { return values_; }

  // Seam-aware accessor: k_theta may be any integer.
  cplx sample(int i_r, long k_theta) const;

  bool all_finite() const;

 private:
  SectorGrid grid_;
  std::vector<cplx> values_;
};

// Accumulated principal-branch phase increments of the field around the grid
// circle at radius index i_r, seam factor included. Equals the loop integral
// of j(u)/|u|^2 for the discrete field. Throws DegreeUndefined if a node
// modulus drops below 1e-9 or a single phase step reaches pi.
double loop_current(const TangentField& field, int i_r);

// Cone degree of a tip-enclosing grid circle: 1 + (loop_current - alpha)/2pi,
// rounded; throws NonIntegerWinding if the residual is >= 0.1.
int degree(const TangentField& field, int i_r);

// Discrete line integral (1/2) oint |d_tau u|^2 along the circle at radius
// index i_r (tangential part of the Dirichlet density only).
double circle_dirichlet(const TangentField& field, int i_r);

// Ginzburg-Landau energy of the discrete field: midpoint rule in the
// differenced direction, trapezoid weights radially, full weights around the
// seam-identified circle.
EnergyBreakdown gl_energy(const TangentField& field, double epsilon);

// Energy plus (optionally) its gradient with respect to the node values,
// in the convention dE = sum Re(conj(g_ik) du_ik). Shared by the analysis
// path and the minimizer so both see the same discrete functional.
double gl_energy_and_gradient(const TangentField& field, double epsilon,
                              std::vector<cplx>* gradient,
                              EnergyBreakdown* breakdown = nullptr);

// Energy restricted to nodes/edges for which `mask` is true at both ends
// (used to report interpolation-layer energies separately).
double gl_energy_masked(const TangentField& field, double epsilon,
                        const std::vector<char>& node_mask);

// Textual serialization: header (alpha, n_r, n_theta, r_min, epsilon)
// followed by one "re im" pair per node, row-major (radius index slow,
// angle index fast), 17 significant digits. Round-trips bit-exactly.
void save_field(const TangentField& field, double epsilon,
                const std::string& path);
void save_field(const TangentField& field, double epsilon, std::ostream& os);

struct LoadedField {
  TangentField field;
  double epsilon;
};
LoadedField load_field(const std::string& path);
LoadedField load_field(std::istream& is);

}  // namespace conegl
