#include "purex/exp_family.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "numeric.hpp"
#include "purex/errors.hpp"

namespace purex {

namespace {

constexpr double kXTol = 1e-12;

std::string describe(Interval iv) {
  std::ostringstream os;
  os << "[" << iv.lo << ", " << iv.hi << "]";
  return os.str();
}

}  // namespace

FamilySpec::FamilySpec(FamilyKind kind, double sigma2, Interval theta, Interval box)
    : kind_(kind), sigma2_(sigma2), theta_(theta), box_(box) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw ValidationError("family: sigma2 must be positive and finite");
  }
  if (!(box.lo < box.hi) || !std::isfinite(box.lo) || !std::isfinite(box.hi)) {
    throw ValidationError("family: box " + describe(box) + " must satisfy lo < hi");
  }
  if (!theta.contains_open(box.lo) || !theta.contains_open(box.hi)) {
    throw ValidationError("family: box " + describe(box) + " must lie strictly inside Θ = " +
                          describe(theta));
  }
}

FamilySpec FamilySpec::gaussian(double sigma2, Interval box) {
  return FamilySpec(FamilyKind::GaussianKnownVariance, sigma2, Interval{-kInfinity, kInfinity},
                    box);
}

FamilySpec FamilySpec::bernoulli(Interval box) {
  return FamilySpec(FamilyKind::Bernoulli, 0.25, Interval{0.0, 1.0}, box);
}

double kl(const FamilySpec& family, double p, double q) {
  if (family.is_gaussian()) {
    const double diff = p - q;
    return diff * diff / (2.0 * family.sigma2());
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("kl: Bernoulli mean p outside [0, 1]");
  }
  if (!(q >= 0.0 && q <= 1.0)) {
    throw DomainError("kl: Bernoulli mean q outside [0, 1]");
  }
  if (p == q) return 0.0;
  if (q <= 0.0 || q >= 1.0) return kInfinity;
  double value = 0.0;
  if (p > 0.0) value += p * std::log(p / q);
  if (p < 1.0) value += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  return std::max(value, 0.0);
}

double natural_param(const FamilySpec& family, double p) {
  if (!family.theta().contains_open(p)) {
    throw DomainError("natural_param: mean outside the open parameter set");
  }
  if (family.is_gaussian()) return p / family.sigma2();
  return std::log(p / (1.0 - p));
}

double natural_param_derivative(const FamilySpec& family, double p) {
  if (family.is_gaussian()) return 1.0 / family.sigma2();
  if (p <= 0.0 || p >= 1.0) return kInfinity;
  return 1.0 / (p * (1.0 - p));
}

double kl_derivative_q(const FamilySpec& family, double p, double q) {
  const double diff = q - p;
  if (diff == 0.0) return 0.0;
  return diff * natural_param_derivative(family, q);
}

std::vector<double> box_project(const FamilySpec& family, std::span<const double> means) {
  const Interval box = family.box();
  std::vector<double> out(means.begin(), means.end());
  for (double& m : out) m = std::clamp(m, box.lo, box.hi);
  return out;
}

double weighted_kl(const FamilySpec& family, double w, double p, double q) {
  if (w == 0.0) return 0.0;
  return w * kl(family, p, q);
}

WeightedKlMin weighted_kl_min(const FamilySpec& family, double w1, double p1, double w2,
                              double p2, double offset) {
  if (!(w1 >= 0.0) || !(w2 >= 0.0) || !std::isfinite(w1) || !std::isfinite(w2)) {
    throw ValidationError("weighted_kl_min: weights must be finite and nonnegative");
  }
  if (!(w1 + w2 > 0.0)) {
    throw ValidationError("weighted_kl_min: at least one weight must be positive");
  }
  auto objective = [&](double x) {
    return weighted_kl(family, w1, p1, x) + weighted_kl(family, w2, p2, x + offset);
  };

  if (family.is_gaussian() || offset == 0.0) {
    // The stationarity condition w1(x − p1)ν'(x) + w2(x + offset − p2)ν'(x + offset) = 0
    // reduces to a weighted mean whenever ν'(x) = ν'(x + offset).
    const double x = (w1 * p1 + w2 * (p2 - offset)) / (w1 + w2);
    return {objective(x), x};
  }

  // Bernoulli with a shift: x ∈ [max(0, −offset), min(1, 1 − offset)].
  const double lo = std::max(0.0, -offset);
  const double hi = std::min(1.0, 1.0 - offset);
  if (!(lo <= hi)) {
    return {kInfinity, std::clamp(p1, 0.0, 1.0)};
  }
  if (lo == hi) {
    return {objective(lo), lo};
  }
  // The objective is convex in x; its derivative changes sign once.
  auto negative_slope = [&](double x) {
    double slope = 0.0;
    if (w1 > 0.0) slope += w1 * kl_derivative_q(family, p1, x);
    if (w2 > 0.0) slope += w2 * kl_derivative_q(family, p2, x + offset);
    return -slope;
  };
  double x = detail::bisect_sign_change(negative_slope, lo, hi, kXTol);
  // The constrained optimum may sit on a boundary point (where the slope is infinite).
  double best = objective(x);
  for (double edge : {lo, hi}) {
    const double v = objective(edge);
    if (v < best) {
      best = v;
      x = edge;
    }
  }
  return {best, x};
}

FamilyConstants family_constants(const FamilySpec& family, std::span<const double> means) {
  const Interval box = family.box();
  FamilyConstants c;
  if (family.is_gaussian()) {
    c.D = box.width() / family.sigma2();
    c.L = box.width() * box.width() / (2.0 * family.sigma2());
  } else {
    c.D = natural_param(family, box.hi) - natural_param(family, box.lo);
    c.L = std::max(kl(family, box.lo, box.hi), kl(family, box.hi, box.lo));
  }
  c.F = kInfinity;
  for (double m : means) {
    c.F = std::min(c.F, std::min(std::abs(m - box.lo), std::abs(m - box.hi)));
  }
  if (means.empty()) c.F = 0.0;
  return c;
}

}  // namespace purex
