#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "purex/problems.hpp"

namespace purex {

/// Solver behind the single-answer game value D_i(μ).
enum class OracleMethod {
  /// Equalize the competitors' best-response values and solve the first-order
  /// condition Σ_a ∂_i G_a / ∂_a G_a = 1 by nested scalar bisection. Exact up to
  /// floating point for every BAI / ε-BAI instance and both families.
  Equalization,
  /// Frank-Wolfe over the simplex on a softmin-smoothed objective with exact
  /// line search (no away steps). Generic but slow to reach tight tolerances.
  FrankWolfe,
};

struct OracleOptions {
  double tol = 1e-8;        // certified additive duality gap
  double i_f_tol = 1e-9;    // band for the furthest-answer argmax set
  OracleMethod method = OracleMethod::Equalization;
  std::size_t max_iterations = 100000;
};

struct DValue {
  double value = 0.0;           // inf over ¬i at `weights`, a lower bound on D_i(μ)
  std::vector<double> weights;  // point on the simplex
  double gap = 0.0;             // certified: D_i(μ) ≤ value + gap
  bool in_closure = false;      // μ ∈ cl(¬i), value 0 with uniform weights
  std::size_t iterations = 0;
};

/// D_i(μ) = sup_ω inf_{λ ∈ ¬i} Σ_k ω_k d(μ_k, λ_k) with a certified gap ≤ tol.
/// Throws ConvergenceError (carrying the best iterate) when the gap cannot be certified.
DValue d_value(const ProblemInstance& problem, const BanditModel& model, Answer answer,
               const OracleOptions& options = {});

struct OracleSolution {
  double t_star_inv = 0.0;              // T*(μ)⁻¹ = max_i D_i(μ), nats per round
  std::vector<double> d_values;         // indexed by answer
  AnswerSet i_f;                        // furthest answers
  std::map<Answer, std::vector<double>> weights;  // one ω* per i ∈ i_F
  double gap = 0.0;
  bool degenerate = false;              // every D_i is 0; i_F = 𝓘, uniform weights
};

/// Solve the characteristic-time game at an arbitrary model (it need not have
/// a unique answer). Propagates ConvergenceError from d_value.
OracleSolution solve(const ProblemInstance& problem, const BanditModel& model,
                     const OracleOptions& options = {});

/// Upper bound on D_i(μ) from supergradients at `weights`, paired with the
/// objective value there. Used as the solvers' stopping certificate.
struct GapCertificate {
  double value = 0.0;
  double upper = 0.0;
  double gap() const noexcept { return upper > value ? upper - value : 0.0; }
};
GapCertificate certify_weights(const ProblemInstance& problem, const BanditModel& model,
                               Answer answer, const std::vector<double>& weights);

/// Exhaustive grid evaluation of the game, for testing. Weight grid on Δ_K with
/// spacing `weight_step`; inner inf over a λ grid of spacing `lambda_step` along
/// each competitor's boundary segment. K ≤ 4; refuses grids with ≥ 1e8 nodes.
/// BAI models with tied maxima are rejected (DegenerateModelError).
OracleSolution brute_force(const ProblemInstance& problem, const BanditModel& model,
                           double weight_step, double lambda_step);

/// Instance lower bound T*(μ)·log(1/(2.4δ)) on E[τ_δ]; +∞ when t_star_inv = 0.
double char_time_lower_bound(double t_star_inv, double delta);

}  // namespace purex
