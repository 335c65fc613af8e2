#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace purex {

/// Forced-exploration level ε_t = (K² + t)^{-1/2} / 2.
double epsilon_t(std::size_t num_arms, std::uint64_t t);

/// ℓ∞ projection of a simplex vector onto Δ_K ∩ [eps, 1]^K by water-filling:
/// deficient coordinates are raised to eps and the total raise is removed
/// uniformly from the coordinates still above eps, repeated until feasible.
/// Throws InfeasibleError when eps > 1/K.
std::vector<double> linf_project(std::span<const double> weights, double eps);

/// C-Tracking state: pull counts N_k(t) and cumulative projected targets.
class TrackerState {
 public:
  explicit TrackerState(std::size_t num_arms, bool keep_history = false);

  std::size_t num_arms() const noexcept { return counts_.size(); }
  std::uint64_t t() const noexcept { return t_; }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
  const std::vector<double>& cum_targets() const noexcept { return cum_targets_; }
  std::uint64_t tracked_rounds() const noexcept { return tracked_rounds_; }
  bool initialized() const noexcept;

  /// Per-round projected targets, populated only with keep_history.
  const std::vector<std::vector<double>>& history() const noexcept { return history_; }

  /// Project `target` with eps, add it to the cumulative targets and return
  /// argmax_k (cum_targets_k − N_k), lowest index on ties. The caller then
  /// records the pull. Throws ValidationError before initialization.
  std::size_t next_action(std::span<const double> target, double eps);

  void record_pull(std::size_t arm);

 private:
  std::uint64_t t_ = 0;
  std::uint64_t tracked_rounds_ = 0;
  std::vector<std::uint64_t> counts_;
  std::vector<double> cum_targets_;
  bool keep_history_;
  std::vector<std::vector<double>> history_;
};

}  // namespace purex
