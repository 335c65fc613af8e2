#include "oracles/linf_reference.hpp"

#include <algorithm>

namespace purex::testref {

double linf_distance_to_clipped_simplex(const std::vector<double>& w, double eps) {
  auto feasible = [&](double r) {
    double lo = 0.0;
    double hi = 0.0;
    for (double v : w) {
      const double a = std::max(eps, v - r);
      const double b = std::min(1.0, v + r);
      if (a > b) return false;
      lo += a;
      hi += b;
    }
    return lo <= 1.0 + 1e-15 && hi >= 1.0 - 1e-15;
  };
  double lo = 0.0;
  double hi = 1.0;
  if (feasible(0.0)) return 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace purex::testref
