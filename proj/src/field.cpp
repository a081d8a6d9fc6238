#include "conegl/field.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "conegl/errors.hpp"

namespace conegl {

namespace {
constexpr double kModulusFloor = 1e-9;

// Principal-branch phase of b relative to a; throws if either modulus is
// below the floor or the step reaches pi.
double phase_step(cplx a, cplx b) {
  if (std::abs(a) < kModulusFloor || std::abs(b) < kModulusFloor) {
    throw DegreeUndefined("loop_current: node modulus below 1e-9");
  }
  const double d = std::arg(b / a);
  if (std::fabs(d) >= kPi - 1e-14) {
    throw DegreeUndefined("loop_current: phase step of magnitude >= pi");
  }
  return d;
}
}  // namespace

cplx TangentField::sample(int i_r, long k_theta) const {
  const long nt = grid_.n_theta();
  long k = k_theta % nt;
  long wraps = k_theta / nt;
  if (k < 0) {
    k += nt;
    wraps -= 1;
  }
  const cplx v = values_[grid_.index(i_r, static_cast<int>(k))];
  if (wraps == 0) return v;
  return v * std::polar(1.0, grid_.cone().alpha * static_cast<double>(wraps));
}

bool TangentField::all_finite() const {
  for (const cplx& v : values_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

double loop_current(const TangentField& field, int i_r) {
  const int nt = field.grid().n_theta();
  double acc = 0.0;
  for (int k = 0; k < nt; ++k) {
    acc += phase_step(field.sample(i_r, k), field.sample(i_r, k + 1));
  }
  return acc;
}

int degree(const TangentField& field, int i_r) {
  const double alpha = field.grid().cone().alpha;
  const double raw = 1.0 + (loop_current(field, i_r) - alpha) / kTwoPi;
  const double rounded = std::round(raw);
  if (std::fabs(raw - rounded) >= 0.1) {
    throw NonIntegerWinding("degree: winding residual >= 0.1");
  }
  return static_cast<int>(rounded);
}

double circle_dirichlet(const TangentField& field, int i_r) {
  const SectorGrid& g = field.grid();
  const double r = g.radius(i_r);
  const double ds = r * g.dtheta();
  double acc = 0.0;
  for (int k = 0; k < g.n_theta(); ++k) {
    const cplx d = field.sample(i_r, k + 1) - field.sample(i_r, k);
    acc += std::norm(d) / (ds * ds) * ds;
  }
  return 0.5 * acc;
}

double gl_energy_and_gradient(const TangentField& field, double epsilon,
                              std::vector<cplx>* gradient,
                              EnergyBreakdown* breakdown) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("gl_energy: epsilon must be positive");
  }
  const SectorGrid& g = field.grid();
  const int nr = g.n_r();
  const int nt = g.n_theta();
  const double dr = g.dr();
  const double dth = g.dtheta();
  const cplx seam = std::polar(1.0, g.cone().alpha);
  const cplx seam_conj = std::conj(seam);
  const std::vector<cplx>& u = field.values();

  if (gradient) {
    gradient->assign(u.size(), cplx{0.0, 0.0});
  }

  double dirichlet = 0.0;
  double potential = 0.0;
  const double pot_coef = 1.0 / (4.0 * epsilon * epsilon);

  for (int i = 0; i < nr; ++i) {
    const double r = g.radius(i);
    const double rho = g.radial_weight(i);
    const double wt = rho * dr / (r * dth);        // angular edge weight
    const double wp = r * rho * dr * dth;          // node quadrature weight
    const double wr =
        (i + 1 < nr) ? (r + 0.5 * dr) * dth / dr : 0.0;  // radial edge weight
    const int row = i * nt;
    const int row_up = row + nt;
    for (int k = 0; k < nt; ++k) {
      const cplx uc = u[row + k];
      // radial edge (i,k)-(i+1,k)
      if (i + 1 < nr) {
        const cplx d = u[row_up + k] - uc;
        dirichlet += 0.5 * wr * std::norm(d);
        if (gradient) {
          (*gradient)[row_up + k] += wr * d;
          (*gradient)[row + k] -= wr * d;
        }
      }
      // angular edge (i,k)-(i,k+1), seam-wrapped on the last one
      const bool wrap = (k == nt - 1);
      const cplx un = wrap ? u[row] * seam : u[row + k + 1];
      const cplx d = un - uc;
      dirichlet += 0.5 * wt * std::norm(d);
      if (gradient) {
        (*gradient)[row + k] -= wt * d;
        if (wrap) {
          (*gradient)[row] += wt * d * seam_conj;
        } else {
          (*gradient)[row + k + 1] += wt * d;
        }
      }
      // potential
      const double one_minus = 1.0 - std::norm(uc);
      potential += pot_coef * wp * one_minus * one_minus;
      if (gradient) {
        (*gradient)[row + k] += -4.0 * pot_coef * wp * one_minus * uc;
      }
    }
  }

  if (breakdown) {
    breakdown->dirichlet = dirichlet;
    breakdown->potential = potential;
    breakdown->total = dirichlet + potential;
    breakdown->epsilon = epsilon;
  }
  return dirichlet + potential;
}

EnergyBreakdown gl_energy(const TangentField& field, double epsilon) {
  EnergyBreakdown b;
  gl_energy_and_gradient(field, epsilon, nullptr, &b);
  return b;
}

double gl_energy_masked(const TangentField& field, double epsilon,
                        const std::vector<char>& node_mask) {
  const SectorGrid& g = field.grid();
  const int nr = g.n_r();
  const int nt = g.n_theta();
  const double dr = g.dr();
  const double dth = g.dtheta();
  const cplx seam = std::polar(1.0, g.cone().alpha);
  const std::vector<cplx>& u = field.values();
  const double pot_coef = 1.0 / (4.0 * epsilon * epsilon);

  double acc = 0.0;
  for (int i = 0; i < nr; ++i) {
    const double r = g.radius(i);
    const double rho = g.radial_weight(i);
    const double wt = rho * dr / (r * dth);
    const double wp = r * rho * dr * dth;
    const double wr = (i + 1 < nr) ? (r + 0.5 * dr) * dth / dr : 0.0;
    for (int k = 0; k < nt; ++k) {
      const bool in = node_mask[g.index(i, k)];
      if (i + 1 < nr && in && node_mask[g.index(i + 1, k)]) {
        acc += 0.5 * wr * std::norm(u[g.index(i + 1, k)] - u[g.index(i, k)]);
      }
      const int kn = (k + 1) % nt;
      if (in && node_mask[g.index(i, kn)]) {
        const cplx un =
            (k == nt - 1) ? u[g.index(i, 0)] * seam : u[g.index(i, kn)];
        acc += 0.5 * wt * std::norm(un - u[g.index(i, k)]);
      }
      if (in) {
        const double om = 1.0 - std::norm(u[g.index(i, k)]);
        acc += pot_coef * wp * om * om;
      }
    }
  }
  return acc;
}

void save_field(const TangentField& field, double epsilon, std::ostream& os) {
  const SectorGrid& g = field.grid();
  if (g.r_max() != 1.0) {
    throw std::invalid_argument("save_field: format covers grids on [r_min, 1]");
  }
  char buf[128];
  os << "conegl-field 1\n";
  std::snprintf(buf, sizeof buf, "%.16e %d %d %.16e %.16e\n",
                g.cone().alpha, g.n_r(), g.n_theta(), g.r_min(), epsilon);
  os << buf;
  for (const cplx& v : field.values()) {
    std::snprintf(buf, sizeof buf, "%.16e %.16e\n", v.real(), v.imag());
    os << buf;
  }
}

void save_field(const TangentField& field, double epsilon,
                const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_field: cannot open " + path);
  save_field(field, epsilon, os);
}

LoadedField load_field(std::istream& is) {
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != "conegl-field" || version != 1) {
    throw std::runtime_error("load_field: bad header");
  }
  double alpha = 0.0, r_min = 0.0, epsilon = 0.0;
  int nr = 0, nt = 0;
  if (!(is >> alpha >> nr >> nt >> r_min >> epsilon)) {
    throw std::runtime_error("load_field: bad parameter line");
  }
  SectorGrid grid(ConeParams(alpha), nr, nt, r_min);
  TangentField f(grid);
  for (cplx& v : f.values()) {
    double re = 0.0, im = 0.0;
    if (!(is >> re >> im)) throw std::runtime_error("load_field: truncated data");
    v = cplx{re, im};
  }
  return LoadedField{std::move(f), epsilon};
}

LoadedField load_field(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_field: cannot open " + path);
  return load_field(is);
}

}  // namespace conegl
