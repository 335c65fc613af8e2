#include "purex/stopping.hpp"

#include "purex/errors.hpp"

namespace purex {

double beta(std::uint64_t t, double delta, std::size_t num_arms) {
  if (t < 1) throw ValidationError("beta: t must be at least 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("beta: delta must be in (0,1)");
  return beta_threshold(static_cast<double>(t), delta, num_arms);
}

GlrResult glr(const ProblemInstance& problem, std::span<const std::uint64_t> counts,
              const BanditModel& emp_means) {
  const std::size_t K = problem.num_arms();
  if (counts.size() != K || emp_means.size() != K) throw ValidationError("glr: size mismatch");
  std::vector<double> weights(K);
  for (std::size_t k = 0; k < K; ++k) {
    if (counts[k] == 0) throw ValidationError("glr: every arm needs at least one pull");
    weights[k] = static_cast<double>(counts[k]);
  }
  GlrResult out;
  out.per_answer.resize(K);
  std::vector<BanditModel> witnesses(K);
  for (Answer i = 0; i < problem.num_answers(); ++i) {
    BestResponse br = best_response(problem, weights, emp_means, i);
    out.per_answer[i] = br.value;
    witnesses[i] = std::move(br.witness);
  }
  out.argmax_answer = answer_from_statistic(out.per_answer);
  out.statistic = out.per_answer[out.argmax_answer];
  out.witness = std::move(witnesses[out.argmax_answer]);
  return out;
}

bool should_stop(const GlrResult& result, std::uint64_t t, double delta, std::size_t num_arms) {
  return result.statistic >= beta(t, delta, num_arms);
}

}  // namespace purex
