#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace purex {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class FamilyKind { GaussianKnownVariance, Bernoulli };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
  bool contains_open(double x) const noexcept { return lo < x && x < hi; }
  double width() const noexcept { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// One-parameter canonical exponential family together with the box
/// [μ_min, μ_max] that confines the admissible means.
///
/// Gaussian arms have Θ = ℝ and known variance σ². Bernoulli arms have
/// Θ = (0,1) and the sub-Gaussian proxy σ² = 1/4.
class FamilySpec {
 public:
  static FamilySpec gaussian(double sigma2, Interval box);
  static FamilySpec bernoulli(Interval box);

  FamilyKind kind() const noexcept { return kind_; }
  double sigma2() const noexcept { return sigma2_; }
  Interval theta() const noexcept { return theta_; }
  Interval box() const noexcept { return box_; }

  bool is_gaussian() const noexcept { return kind_ == FamilyKind::GaussianKnownVariance; }
  bool is_bernoulli() const noexcept { return kind_ == FamilyKind::Bernoulli; }

  friend bool operator==(const FamilySpec&, const FamilySpec&) = default;

 private:
  FamilySpec(FamilyKind kind, double sigma2, Interval theta, Interval box);

  FamilyKind kind_;
  double sigma2_;
  Interval theta_;
  Interval box_;
};

struct FamilyConstants {
  double L = 0.0;  // sup of d(p,q) over the box, nats
  double D = 0.0;  // sup of |ν_p − ν_q| over the box
  double F = 0.0;  // distance of the closest mean to the box boundary
};

/// KL divergence d(p, q) between the members with means p and q.
///
/// For Bernoulli, p may sit on {0, 1} (0·ln 0 = 0). A second argument on
/// {0, 1} different from p yields +∞, which callers treat as an excluded
/// alternative.
double kl(const FamilySpec& family, double p, double q);

/// Natural parameter ν_p. Throws DomainError unless p lies in the open Θ.
double natural_param(const FamilySpec& family, double p);

/// dν/dp, i.e. the inverse variance of the member with mean p (+∞ on ∂Θ).
double natural_param_derivative(const FamilySpec& family, double p);

/// ∂d(p, q)/∂q = (q − p)·ν'(q).
double kl_derivative_q(const FamilySpec& family, double p, double q);

/// Coordinatewise clamp onto [μ_min, μ_max]^K.
std::vector<double> box_project(const FamilySpec& family, std::span<const double> means);

/// w·d(p, q) with the convention 0·∞ = 0.
double weighted_kl(const FamilySpec& family, double w, double p, double q);

struct WeightedKlMin {
  double value = 0.0;
  double minimizer = 0.0;  // x; the second coordinate sits at x + offset
};

/// min over x of w1·d(p1, x) + w2·d(p2, x + offset) with x, x + offset in cl(Θ).
///
/// Gaussian arms and zero offsets use the weighted-mean closed form; the
/// Bernoulli offset case bisects the monotone derivative to 1e-12 in x.
/// Throws ValidationError when w1 + w2 <= 0 or a weight is negative.
WeightedKlMin weighted_kl_min(const FamilySpec& family, double w1, double p1, double w2,
                              double p2, double offset);

FamilyConstants family_constants(const FamilySpec& family, std::span<const double> means);

}  // namespace purex
