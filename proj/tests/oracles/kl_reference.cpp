#include "oracles/kl_reference.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace purex::testref {

double kl_gaussian_quadrature(double sigma2, double p, double q) {
  const double s = std::sqrt(sigma2);
  const double lo = p - 14.0 * s;
  const double hi = p + 14.0 * s;
  const int n = 40000;
  const double h = (hi - lo) / n;
  auto f = [&](double x) {
    const double dens = std::exp(-(x - p) * (x - p) / (2.0 * sigma2)) / std::sqrt(2.0 * std::numbers::pi * sigma2);
    const double log_ratio = ((x - q) * (x - q) - (x - p) * (x - p)) / (2.0 * sigma2);
    return dens * log_ratio;
  };
  double sum = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) sum += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

double kl_bernoulli_sum(double p, double q) {
  double total = 0.0;
  const double P[2] = {1.0 - p, p};
  const double Q[2] = {1.0 - q, q};
  for (int x = 0; x < 2; ++x) {
    if (P[x] == 0.0) continue;
    if (Q[x] == 0.0) return std::numeric_limits<double>::infinity();
    total += P[x] * std::log(P[x] / Q[x]);
  }
  return total;
}

namespace {

// Solve A'(θ) = p where A' is increasing.
template <class F>
double invert(F&& mean_of, double p, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mean_of(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double natural_param_gaussian(double sigma2, double p) {
  return invert([&](double th) { return sigma2 * th; }, p, -1e6, 1e6);
}

double natural_param_bernoulli(double p) {
  return invert([](double th) { return 1.0 / (1.0 + std::exp(-th)); }, p, -50.0, 50.0);
}

}  // namespace purex::testref
