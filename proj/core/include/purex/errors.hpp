#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace purex {

/// Bad input: malformed configuration, out-of-range argument, violated precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A mean (or other argument) falls outside the admissible parameter set.
class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// The model has no unique correct answer where one is required (tied maxima).
class DegenerateModelError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// The ℓ∞ projection target set is empty (eps > 1/K).
class InfeasibleError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// An iterative solver failed to reach its tolerance. Carries the best iterate.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> best_iterate,
                   double best_value, double gap)
      : std::runtime_error(what),
        best_iterate_(std::move(best_iterate)),
        best_value_(best_value),
        gap_(gap) {}

  const std::vector<double>& best_iterate() const noexcept { return best_iterate_; }
  double best_value() const noexcept { return best_value_; }
  double gap() const noexcept { return gap_; }

 private:
  std::vector<double> best_iterate_;
  double best_value_;
  double gap_;
};

/// A search ran past its hard cap (round counts, grid sizes).
class CapExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace purex
