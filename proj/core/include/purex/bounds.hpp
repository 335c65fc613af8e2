#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "purex/algorithm_kind.hpp"
#include "purex/errors.hpp"
#include "purex/exp_family.hpp"
#include "purex/oracle.hpp"
#include "purex/problems.hpp"

namespace purex {

/// Round counts in the theorem bounds routinely exceed 1e24 (the exploration
/// constant D_K is ~2e6 already at K = 2), so they are carried in 100-digit
/// binary floating point, which keeps unit resolution up to ~1e90.
using BigReal = boost::multiprecision::cpp_bin_float_100;

/// Right-hand side of the D_K inequality
///   D ≥ e Σ_{t≥1} (e/K)^K (log²(D t²) log t)^K / t²,
/// summed exactly to t = 10⁶ with a certified upper bound on the remainder.
double dk_series_rhs(double dk, std::size_t num_arms);

/// Smallest fixed point ≥ 1 of the D_K inequality, reached by iterating
/// D ← max(1, RHS(D)) from D = 1. The result is inflated by the stopping
/// tolerance so that RHS(D) ≤ D holds. Throws ConvergenceError after 10³ iterations.
double solve_dk(std::size_t num_arms);

struct GInputs {
  std::size_t num_arms = 2;
  double dk = 1.0;
  FamilyConstants constants;
  double sigma2 = 1.0;
};

template <class Real>
struct GTerms {
  Real h1, h2, h3, h4, h5;  // t·h_i(t)
};

/// The five slack terms multiplied by t, f(t) = D_K log t. Requires t ≥ 10K⁴.
template <class Real>
GTerms<Real> g_terms(const Real& t, const GInputs& in) {
  using std::log;
  using std::sqrt;
  using std::pow;
  const double k = static_cast<double>(in.num_arms);
  if (t < Real(10.0 * k * k * k * k)) {
    throw ValidationError("g: requires t >= 10 K^4");
  }
  const Real f = Real(in.dk) * log(t);
  const Real D = Real(in.constants.D);
  const Real L = Real(in.constants.L);
  const Real two_s2 = Real(2.0 * in.sigma2);
  const Real klnk = Real(k * std::log(k));
  const Real root_f = sqrt(two_s2 * f);
  const Real drift = sqrt(Real(8) * pow(t, Real(1.5)) + Real(8.0 * k) * t * log(t));
  GTerms<Real> out;
  out.h1 = D * sqrt(two_s2 * Real(k) * f * t);
  out.h2 = L * Real(k * k) * Real(std::log(k)) * sqrt(t + Real(k * k));
  out.h3 = D * root_f * (klnk + Real(4) * sqrt(Real(k) * t) + Real(k * k) * sqrt(t + Real(k * k)));
  out.h4 = D * root_f * drift;
  out.h5 = Real(2) * D * root_f * drift;
  return out;
}

/// g(t) = t·(h₁ + h₂ + h₃ + h₄) for Track-and-Stop.
template <class Real>
Real g_tas(const Real& t, const GInputs& in) {
  const GTerms<Real> h = g_terms(t, in);
  return h.h1 + h.h2 + h.h3 + h.h4;
}

/// g(t) for Sticky Track-and-Stop: g_tas plus t·h₅.
template <class Real>
Real g_stas(const Real& t, const GInputs& in) {
  const GTerms<Real> h = g_terms(t, in);
  return h.h1 + h.h2 + h.h3 + h.h4 + h.h5;
}

struct T0Query {
  double delta = 0.1;
  std::size_t num_arms = 2;
  double t_star_inv = 0.0;
  Algorithm variant = Algorithm::TaS;
  BigReal t_mu = 0;        // ignored for TaS
  GInputs g;
  bool zero_g = false;     // diagnostic: g ≡ 0
};

/// β_{t,δ} ≤ (t − √t − 1 − T_μ)·T*⁻¹ − g(t), with T_μ = 0 for TaS.
bool t0_predicate(const BigReal& t, const T0Query& q);

/// Smallest integer t ≥ 10K⁴ satisfying t0_predicate; doubling then bisection,
/// followed by a 10-point probe above the result that restarts the search if
/// the predicate turns false again. Throws CapExceededError past 1e80.
BigReal compute_t0(const T0Query& q);

/// √(c σ² D_K log n / (√(√n + K²) − 2K)) ≤ threshold, false where the denominator is ≤ 0.
bool drift_predicate(const BigReal& n, std::size_t num_arms, double sigma2, double dk,
                     double constant, double threshold);

/// T_M = max{10K⁴, inf{n: √(4σ²D_K log n / (√(√n+K²) − 2K)) ≤ F}}.
BigReal compute_tm(std::size_t num_arms, double sigma2, double dk, double F);

/// T_μ = max{10K⁴, inf{n: √(8D_Kσ² log n / (√(√n+K²) − 2K)) ≤ ε_μ}}.
BigReal compute_tmu(std::size_t num_arms, double sigma2, double dk, double eps_mu);

struct EpsMuProbe {
  double eps_mu = 0.0;
  bool certified = false;  // always false: sampled, not proven
};

/// Largest η in a decreasing grid such that every sampled μ′ with ‖μ′ − μ‖∞ ≤ η
/// (box corners, axis points and seeded random points) satisfies
/// i_F(μ′) ⊆ i_F(μ) ∪ (𝓘 ∖ i*(μ)). Throws ValidationError if nothing passes.
EpsMuProbe probe_eps_mu(const ProblemInstance& problem, const BanditModel& model,
                        const OracleOptions& oracle, const std::vector<double>& grid);

std::vector<double> default_eps_mu_grid();

struct BoundInputs {
  ProblemInstance problem;
  BanditModel model;
  std::optional<double> dk_override;
  std::optional<double> eps_mu;
  OracleOptions oracle;
};

struct BoundReport {
  std::size_t num_arms = 0;
  double delta = 0.0;
  Algorithm variant = Algorithm::TaS;
  bool raw_mode = false;
  double dk = 0.0;
  bool dk_overridden = false;
  FamilyConstants constants;
  double sigma2 = 0.0;
  double t_star_inv = 0.0;
  BigReal t_m = 0;
  BigReal t_mu = 0;
  double eps_mu = 0.0;
  bool eps_mu_probed = false;
  BigReal t0 = 0;
  double ten_k4 = 0.0;
  double pi2_over_24 = 0.0;
  BigReal upper_bound = 0;
  double lower_bound = 0.0;
};

/// Assemble every bound quantity for one instance and δ. The upper bound is
/// 10K⁴ + π²/24 + T₀(δ), plus T_M in raw (unprojected) mode.
BoundReport theorem_bound(const BoundInputs& inputs, double delta, Algorithm variant,
                          bool raw_mode);

/// BoundReport as a JSON object; round counts appear both as exact integer
/// strings and as doubles.
std::string to_json(const BoundReport& report);

std::string to_integer_string(const BigReal& value);

}  // namespace purex
