#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "purex/exp_family.hpp"

namespace purex {

/// Answers are arm indices, 0-based.
using Answer = std::size_t;
using AnswerSet = std::vector<Answer>;  // sorted ascending, no duplicates

enum class ProblemKind { BestArm, EpsilonBestArm };

/// Vector of arm means μ.
class BanditModel {
 public:
  BanditModel() = default;
  explicit BanditModel(std::vector<double> means);
  BanditModel(std::initializer_list<double> means) : BanditModel(std::vector<double>(means)) {}

  std::size_t size() const noexcept { return means_.size(); }
  double operator[](std::size_t k) const { return means_[k]; }
  double& operator[](std::size_t k) { return means_[k]; }
  std::span<const double> means() const noexcept { return means_; }
  const std::vector<double>& vec() const noexcept { return means_; }

  friend bool operator==(const BanditModel&, const BanditModel&) = default;

 private:
  std::vector<double> means_;
};

/// Answer space [K] with the BAI or ε-BAI answer rule over a family.
class ProblemInstance {
 public:
  static ProblemInstance best_arm(FamilySpec family, std::size_t num_arms);
  static ProblemInstance epsilon_best_arm(FamilySpec family, std::size_t num_arms,
                                          double epsilon);

  const FamilySpec& family() const noexcept { return family_; }
  std::size_t num_arms() const noexcept { return num_arms_; }
  std::size_t num_answers() const noexcept { return num_arms_; }
  ProblemKind kind() const noexcept { return kind_; }
  double epsilon() const noexcept { return epsilon_; }

  /// Shift between λ_i and λ_a on the boundary of the alternative piece
  /// {λ_i ≤ λ_a − offset}: ε for ε-BAI, 0 for BAI.
  double alternative_offset() const noexcept { return epsilon_; }

  /// Throws DomainError / ValidationError when the model does not fit this problem.
  void check_model(const BanditModel& model) const;

 private:
  ProblemInstance(FamilySpec family, std::size_t num_arms, ProblemKind kind, double epsilon);

  FamilySpec family_;
  std::size_t num_arms_;
  ProblemKind kind_;
  double epsilon_;
};

/// The set of correct answers i*(μ). BAI throws DegenerateModelError on tied maxima.
AnswerSet i_star(const ProblemInstance& problem, const BanditModel& model);

/// Whether μ ∈ cl(¬i), i.e. answer i is not strictly correct at μ.
bool in_alternative_closure(const ProblemInstance& problem, const BanditModel& model,
                            Answer answer);

struct BestResponse {
  double value = 0.0;       // inf over ¬i of Σ w_k d(μ_k, λ_k), nats
  BanditModel witness;      // λ attaining the inf (in cl(¬i))
  Answer answer = 0;        // i
  Answer competitor = 0;    // a, the arm whose constraint binds
  bool degenerate = false;  // all weights zero
};

/// inf_{λ ∈ ¬i} Σ_k w_k d(μ_k, λ_k), decomposed over competitors a ≠ i into
/// two-coordinate problems. Ties between competitors go to the lowest index.
BestResponse best_response(const ProblemInstance& problem, std::span<const double> weights,
                           const BanditModel& model, Answer answer);

/// Argmax over answers; lowest index wins ties.
Answer answer_from_statistic(std::span<const double> values);

}  // namespace purex
