#include "purex/problems.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "purex/errors.hpp"

namespace purex {

BanditModel::BanditModel(std::vector<double> means) : means_(std::move(means)) {
  for (double m : means_) {
    if (!std::isfinite(m)) throw ValidationError("bandit model: means must be finite");
  }
}

ProblemInstance::ProblemInstance(FamilySpec family, std::size_t num_arms, ProblemKind kind,
                                 double epsilon)
    : family_(family), num_arms_(num_arms), kind_(kind), epsilon_(epsilon) {
  if (num_arms < 2) throw ValidationError("problem: need at least two arms");
  if (kind == ProblemKind::EpsilonBestArm) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      throw ValidationError("problem: epsilon must be positive");
    }
    if (family.is_bernoulli() && epsilon >= 1.0) {
      throw ValidationError("problem: Bernoulli epsilon must be below 1");
    }
  }
}

ProblemInstance ProblemInstance::best_arm(FamilySpec family, std::size_t num_arms) {
  return ProblemInstance(family, num_arms, ProblemKind::BestArm, 0.0);
}

ProblemInstance ProblemInstance::epsilon_best_arm(FamilySpec family, std::size_t num_arms,
                                                  double epsilon) {
  return ProblemInstance(family, num_arms, ProblemKind::EpsilonBestArm, epsilon);
}

void ProblemInstance::check_model(const BanditModel& model) const {
  if (model.size() != num_arms_) {
    throw ValidationError("model has " + std::to_string(model.size()) + " arms, problem has " +
                          std::to_string(num_arms_));
  }
  const Interval theta = family_.theta();
  for (double m : model.means()) {
    if (!theta.contains(m)) throw DomainError("model mean outside the family's parameter set");
  }
}

AnswerSet i_star(const ProblemInstance& problem, const BanditModel& model) {
  problem.check_model(model);
  const auto means = model.means();
  const double best = *std::max_element(means.begin(), means.end());
  AnswerSet out;
  if (problem.kind() == ProblemKind::BestArm) {
    for (Answer k = 0; k < means.size(); ++k) {
      if (means[k] == best) out.push_back(k);
    }
    if (out.size() != 1) {
      throw DegenerateModelError("i_star: best arm is not unique (tied maxima)");
    }
    return out;
  }
  const double eps = problem.epsilon();
  for (Answer k = 0; k < means.size(); ++k) {
    if (means[k] >= best - eps) out.push_back(k);
  }
  return out;
}

bool in_alternative_closure(const ProblemInstance& problem, const BanditModel& model,
                            Answer answer) {
  const double off = problem.alternative_offset();
  for (Answer a = 0; a < model.size(); ++a) {
    if (a != answer && model[answer] <= model[a] - off) return true;
  }
  return false;
}

BestResponse best_response(const ProblemInstance& problem, std::span<const double> weights,
                           const BanditModel& model, Answer answer) {
  const std::size_t K = problem.num_arms();
  if (weights.size() != K || model.size() != K) {
    throw ValidationError("best_response: size mismatch");
  }
  if (answer >= K) throw ValidationError("best_response: answer out of range");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ValidationError("best_response: weights must be finite and nonnegative");
    }
    total += w;
  }

  BestResponse best;
  best.answer = answer;
  best.witness = model;
  if (total == 0.0) {
    best.degenerate = true;
    best.competitor = answer == 0 ? 1 : 0;
    return best;
  }

  const FamilySpec& family = problem.family();
  const double off = problem.alternative_offset();
  best.value = kInfinity;
  bool found = false;
  for (Answer a = 0; a < K; ++a) {
    if (a == answer) continue;
    if (model[answer] <= model[a] - off) {
      // μ already violates answer i through competitor a.
      best.value = 0.0;
      best.competitor = a;
      best.witness = model;
      return best;
    }
    const double wi = weights[answer];
    const double wa = weights[a];
    double value;
    double x;
    if (wi + wa == 0.0) {
      // Both coordinates are free: move them onto the boundary at zero cost.
      value = 0.0;
      x = model[answer];
    } else {
      const WeightedKlMin m = weighted_kl_min(family, wi, model[answer], wa, model[a], off);
      value = m.value;
      x = m.minimizer;
    }
    if (!std::isfinite(value)) continue;  // alternative piece excluded
    if (!found || value < best.value) {
      found = true;
      best.value = value;
      best.competitor = a;
      best.witness = model;
      best.witness[answer] = x;
      best.witness[a] = x + off;
    }
  }
  if (!found) {
    best.competitor = answer == 0 ? 1 : 0;
  }
  return best;
}

Answer answer_from_statistic(std::span<const double> values) {
  if (values.empty()) throw ValidationError("answer_from_statistic: empty input");
  Answer best = 0;
  for (Answer i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace purex
