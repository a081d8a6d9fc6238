#include "conegl/degree_cost.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace conegl {

namespace {
double tip_cost(int d0, const ConeParams& cone) {
  const double x = d0 - 1.0 + cone.beta();
  return (kTwoPi / cone.alpha) * x * x;
}
}  // namespace

DegreeSplit m_bruteforce(int d, const ConeParams& cone, int bound) {
  const int needed =
      std::abs(d) + static_cast<int>(std::ceil(kTwoPi / cone.alpha)) + 2;
  if (bound < needed) {
    throw std::invalid_argument("m_bruteforce: bound too small");
  }
  DegreeSplit best;
  bool have = false;
  for (int d0 = -bound; d0 <= bound; ++d0) {
    const int d1 = d - d0;
    const double cost = tip_cost(d0, cone) + std::abs(d1);
    const bool better =
        !have || cost < best.cost - 1e-15 ||
        (std::fabs(cost - best.cost) <= 1e-15 && std::abs(d0) < std::abs(best.d0));
    if (better) {
      best = DegreeSplit{d0, d1, cost};
      have = true;
    }
  }
  return best;
}

DegreeSplit m_bruteforce(int d, const ConeParams& cone) {
  const int needed =
      std::abs(d) + static_cast<int>(std::ceil(kTwoPi / cone.alpha)) + 2;
  return m_bruteforce(d, cone, std::max(std::abs(d) + 10, needed));
}

double m_closed(int d, const ConeParams& cone) {
  const double alpha = cone.alpha;
  if (d <= 0 && alpha > kTwoPi / 3.0) {
    const double t = alpha - kTwoPi;
    return std::abs(d) + t * t / (kTwoPi * alpha);
  }
  return std::abs(d - 1) + alpha / kTwoPi;
}

bool additivity_check(int dbar, const std::vector<int>& split,
                      const ConeParams& cone) {
  if (split.empty()) throw std::invalid_argument("additivity_check: empty split");
  long sum = 0;
  for (int s : split) sum += s;
  if (sum != dbar) {
    throw std::invalid_argument("additivity_check: split does not sum to dbar");
  }
  double rhs = m_closed(split[0], cone);
  for (std::size_t j = 1; j < split.size(); ++j) rhs += std::abs(split[j]);
  return m_closed(dbar, cone) <= rhs + 1e-12;
}

}  // namespace conegl
