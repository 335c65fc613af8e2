#pragma once

// Scalar root and minimum bracketing used across the solvers. Endpoints are
// never evaluated, so callers may pass brackets where the function blows up.

#include <cmath>
#include <utility>

namespace purex::detail {

/// Root of a nonincreasing-sign function (positive on the left, negative on the
/// right) inside (lo, hi). Returns the midpoint of the final bracket.
template <class F>
double bisect_sign_change(F&& f, double lo, double hi, double x_tol, int max_iter = 200) {
  for (int it = 0; it < max_iter && hi - lo > x_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double v = f(mid);
    if (v > 0.0) {
      lo = mid;
    } else if (v < 0.0) {
      hi = mid;
    } else {
      return mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Minimum of a unimodal function on [lo, hi] by golden-section search.
template <class F>
std::pair<double, double> golden_section_minimize(F&& f, double lo, double hi, double x_tol,
                                                  int max_iter = 300) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iter && b - a > x_tol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  const double fx = f(x);
  if (fc < fx && fc <= fd) return {c, fc};
  if (fd < fx) return {d, fd};
  return {x, fx};
}

}  // namespace purex::detail
