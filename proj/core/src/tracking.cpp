#include "purex/tracking.hpp"

#include <algorithm>
#include <cmath>

#include "purex/errors.hpp"

namespace purex {

double epsilon_t(std::size_t num_arms, std::uint64_t t) {
  const double k = static_cast<double>(num_arms);
  return 0.5 / std::sqrt(k * k + static_cast<double>(t));
}

std::vector<double> linf_project(std::span<const double> weights, double eps) {
  const std::size_t K = weights.size();
  if (K == 0) throw ValidationError("linf_project: empty weight vector");
  if (!(eps >= 0.0)) throw ValidationError("linf_project: eps must be nonnegative");
  if (eps * static_cast<double>(K) > 1.0 + 1e-12) {
    throw InfeasibleError("linf_project: eps exceeds 1/K");
  }
  std::vector<double> out(weights.begin(), weights.end());
  std::vector<bool> pinned(K, false);
  for (std::size_t pass = 0; pass <= K; ++pass) {
    double deficit = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      if (out[k] < eps) {
        deficit += eps - out[k];
        out[k] = eps;
        pinned[k] = true;
      }
    }
    if (deficit == 0.0) break;
    std::size_t free_count = 0;
    for (std::size_t k = 0; k < K; ++k) {
      if (!pinned[k] && out[k] > eps) ++free_count;
    }
    if (free_count == 0) break;
    const double share = deficit / static_cast<double>(free_count);
    for (std::size_t k = 0; k < K; ++k) {
      if (!pinned[k] && out[k] > eps) out[k] -= share;
    }
  }
  return out;
}

TrackerState::TrackerState(std::size_t num_arms, bool keep_history)
    : counts_(num_arms, 0), cum_targets_(num_arms, 0.0), keep_history_(keep_history) {
  if (num_arms == 0) throw ValidationError("tracker: need at least one arm");
}

bool TrackerState::initialized() const noexcept {
  return std::all_of(counts_.begin(), counts_.end(), [](std::uint64_t c) { return c > 0; });
}

std::size_t TrackerState::next_action(std::span<const double> target, double eps) {
  if (!initialized()) throw ValidationError("tracker: every arm must be pulled once first");
  if (target.size() != num_arms()) throw ValidationError("tracker: target size mismatch");
  std::vector<double> projected = linf_project(target, eps);
  for (std::size_t k = 0; k < num_arms(); ++k) cum_targets_[k] += projected[k];
  ++tracked_rounds_;
  if (keep_history_) history_.push_back(std::move(projected));

  std::size_t best = 0;
  double best_score = cum_targets_[0] - static_cast<double>(counts_[0]);
  for (std::size_t k = 1; k < num_arms(); ++k) {
    const double score = cum_targets_[k] - static_cast<double>(counts_[k]);
    if (score > best_score) {
      best = k;
      best_score = score;
    }
  }
  return best;
}

void TrackerState::record_pull(std::size_t arm) {
  if (arm >= num_arms()) throw ValidationError("tracker: arm out of range");
  ++counts_[arm];
  ++t_;
}

}  // namespace purex
