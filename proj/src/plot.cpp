#include "conegl/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace conegl {

namespace {

struct Rgb {
  unsigned char r, g, b;
};

// five-stop ramp from dark blue through off-white to dark red
Rgb colormap(double t) {
  t = std::clamp(t, 0.0, 1.0);
  static const double stops[5][3] = {{0.05, 0.05, 0.35},
                                     {0.15, 0.45, 0.80},
                                     {0.92, 0.92, 0.88},
                                     {0.85, 0.45, 0.15},
                                     {0.55, 0.04, 0.04}};
  const double x = t * 4.0;
  const int lo = std::min(3, static_cast<int>(x));
  const double f = x - lo;
  Rgb c;
  c.r = static_cast<unsigned char>(
      255.0 * (stops[lo][0] + f * (stops[lo + 1][0] - stops[lo][0])));
  c.g = static_cast<unsigned char>(
      255.0 * (stops[lo][1] + f * (stops[lo + 1][1] - stops[lo][1])));
  c.b = static_cast<unsigned char>(
      255.0 * (stops[lo][2] + f * (stops[lo + 1][2] - stops[lo][2])));
  return c;
}

void write_ppm(const std::vector<Rgb>& pixels, int w, int h,
               const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << "P6\n" << w << " " << h << "\n255\n";
  os.write(reinterpret_cast<const char*>(pixels.data()),
           static_cast<std::streamsize>(pixels.size() * 3));
}

}  // namespace

void write_modulus_heatmap(const TangentField& field, const std::string& path,
                           int width) {
  const SectorGrid& g = field.grid();
  const int h = width;
  std::vector<Rgb> img(static_cast<std::size_t>(width) * h,
                       Rgb{255, 255, 255});
  for (int py = 0; py < h; ++py) {
    for (int px = 0; px < width; ++px) {
      const double x = 2.0 * (px + 0.5) / width - 1.0;
      const double y = 1.0 - 2.0 * (py + 0.5) / h;
      const double r = std::hypot(x, y);
      if (r > g.r_max() || r < g.r_min()) continue;
      double t = std::atan2(y, x);
      if (t < 0.0) t += kTwoPi;
      if (t >= g.cone().alpha) continue;
      const double fi =
          std::clamp((r - g.r_min()) / g.dr(), 0.0, g.n_r() - 1.0);
      const int i = std::min(static_cast<int>(fi), g.n_r() - 2);
      const double wr = fi - i;
      const double fk = t / g.dtheta();
      const int k = std::min(static_cast<int>(fk), g.n_theta() - 1);
      const double wk = fk - k;
      const double m00 = std::abs(field.at(i, k));
      const double m10 = std::abs(field.at(i + 1, k));
      const double m01 = std::abs(field.sample(i, k + 1));
      const double m11 = std::abs(field.sample(i + 1, k + 1));
      const double m = (1 - wr) * ((1 - wk) * m00 + wk * m01) +
                       wr * ((1 - wk) * m10 + wk * m11);
      img[static_cast<std::size_t>(py) * width + px] = colormap(m);
    }
  }
  write_ppm(img, width, h, path);
}

void write_phase_quiver(const TangentField& field, const std::string& path,
                        int stride) {
  const SectorGrid& g = field.grid();
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  const int size = 800;
  const double scale = size / 2.2;
  auto toX = [&](double x) { return size / 2.0 + scale * x; };
  auto toY = [&](double y) { return size / 2.0 - scale * y; };
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size
     << "\" height=\"" << size << "\">\n";
  char buf[256];
  const double alpha = g.cone().alpha;
  std::snprintf(buf, sizeof buf,
                "<path d=\"M %.2f %.2f L %.2f %.2f M %.2f %.2f L %.2f %.2f\" "
                "stroke=\"#888\" fill=\"none\"/>\n",
                toX(0.0), toY(0.0), toX(1.0), toY(0.0), toX(0.0), toY(0.0),
                toX(std::cos(alpha)), toY(std::sin(alpha)));
  os << buf;
  for (int i = 0; i < g.n_r(); i += stride) {
    for (int k = 0; k < g.n_theta(); k += stride) {
      const double r = g.radius(i);
      const double t = g.angle(k);
      const cplx v = field.at(i, k);
      const double len = 0.9 * stride * g.dr() * std::abs(v);
      const double ux = toX(r * std::cos(t));
      const double uy = toY(r * std::sin(t));
      const double vx = toX(r * std::cos(t) + len * v.real());
      const double vy = toY(r * std::sin(t) + len * v.imag());
      std::snprintf(buf, sizeof buf,
                    "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                    "stroke=\"#134\" stroke-width=\"1\"/>\n",
                    ux, uy, vx, vy);
      os << buf;
      std::snprintf(
          buf, sizeof buf,
          "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"1.2\" fill=\"#134\"/>\n", ux,
          uy);
      os << buf;
    }
  }
  os << "</svg>\n";
}

void write_scalar_heatmap(const std::vector<double>& values, int nx, int ny,
                          const std::string& path) {
  if (static_cast<int>(values.size()) != nx * ny) {
    throw std::invalid_argument("write_scalar_heatmap: size mismatch");
  }
  double lo = 1e300, hi = -1e300;
  for (double v : values) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(hi > lo)) hi = lo + 1.0;
  std::vector<Rgb> img(values.size(), Rgb{255, 255, 255});
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (std::isfinite(values[j])) {
      img[j] = colormap((values[j] - lo) / (hi - lo));
    }
  }
  write_ppm(img, nx, ny, path);
}

}  // namespace conegl
