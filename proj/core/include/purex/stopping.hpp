#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "purex/problems.hpp"

namespace purex {

/// β_{t,δ} = log(1/δ) + K log(4 log(1/δ) + 1) + 6K log(log t + 3), in nats.
/// Generic over the real type so the bound calculator can evaluate it at
/// round counts far beyond double resolution.
template <class Real>
Real beta_threshold(const Real& t, double delta, std::size_t num_arms) {
  using std::log;
  const double log_inv_delta = std::log(1.0 / delta);
  const double k = static_cast<double>(num_arms);
  const Real head = Real(log_inv_delta + k * std::log(4.0 * log_inv_delta + 1.0));
  return head + Real(6.0 * k) * log(log(t) + Real(3));
}

/// β_{t,δ} for t ≥ 1 and δ ∈ (0,1); throws ValidationError otherwise.
double beta(std::uint64_t t, double delta, std::size_t num_arms);

struct GlrResult {
  double statistic = 0.0;           // max over answers of the per-answer value
  std::vector<double> per_answer;   // inf_{λ ∈ ¬i} Σ_k N_k d(μ̂_k, λ_k)
  Answer argmax_answer = 0;         // recommendation, lowest index on ties
  BanditModel witness;              // closest alternative for the argmax answer
};

/// Generalized likelihood ratio statistic at counts N(t) and empirical means μ̂(t).
/// Throws ValidationError if any arm has no pulls.
GlrResult glr(const ProblemInstance& problem, std::span<const std::uint64_t> counts,
              const BanditModel& emp_means);

bool should_stop(const GlrResult& result, std::uint64_t t, double delta, std::size_t num_arms);

}  // namespace purex
