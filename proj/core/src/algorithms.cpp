#include "purex/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "numeric.hpp"
#include "purex/errors.hpp"

namespace purex {

namespace {

struct MinCost {
  double cost = kInfinity;
  std::vector<double> point;
};

// Scalar search over the level y of the constrained coordinates. `fill`
// writes the cheapest model whose constrained level is y.
template <class Fill>
MinCost min_over_level(const FamilySpec& family, const ConfidenceRegion& region, Fill&& fill) {
  const Interval box = family.box();
  std::vector<double> lambda(region.center.size());
  auto cost = [&](double y) {
    fill(y, lambda);
    return region.divergence(family, lambda);
  };
  auto [y, c] = detail::golden_section_minimize(cost, box.lo, box.hi, 1e-13 * (1.0 + box.width()));
  for (double end : {box.lo, box.hi}) {
    const double ce = cost(end);
    if (ce < c) {
      c = ce;
      y = end;
    }
  }
  MinCost out;
  out.cost = c;
  fill(y, lambda);
  out.point = lambda;
  return out;
}

// Cheapest model in the box with λ_i ≥ λ_a − off for every a.
MinCost min_cost_answer(const FamilySpec& family, const ConfidenceRegion& region, Answer i,
                        double off) {
  const Interval box = family.box();
  return min_over_level(family, region, [&](double y, std::vector<double>& lambda) {
    const double cap = std::min(box.hi, y + off);
    for (std::size_t a = 0; a < lambda.size(); ++a) {
      lambda[a] = a == i ? y : std::clamp(region.center[a], box.lo, cap);
    }
  });
}

// Cheapest model in the box with λ_i = λ_j ≥ every other coordinate.
MinCost min_cost_tie(const FamilySpec& family, const ConfidenceRegion& region, Answer i,
                     Answer j) {
  const Interval box = family.box();
  return min_over_level(family, region, [&](double y, std::vector<double>& lambda) {
    for (std::size_t a = 0; a < lambda.size(); ++a) {
      lambda[a] = (a == i || a == j) ? y : std::clamp(region.center[a], box.lo, y);
    }
  });
}

bool in_furthest_set(const ProblemInstance& problem, const std::vector<double>& lambda,
                     Answer i, const OracleOptions& oracle) {
  try {
    const OracleSolution sol = solve(problem, BanditModel(lambda), oracle);
    return std::binary_search(sol.i_f.begin(), sol.i_f.end(), i);
  } catch (const ConvergenceError&) {
    return false;
  }
}

// D_i(λ) − max_{j≠i} D_j(λ).
double margin(const ProblemInstance& problem, const std::vector<double>& lambda, Answer i,
              const OracleOptions& oracle) {
  const BanditModel model(lambda);
  double own = 0.0;
  double other = -kInfinity;
  try {
    for (Answer j = 0; j < problem.num_answers(); ++j) {
      const double v = d_value(problem, model, j, oracle).value;
      if (j == i) {
        own = v;
      } else {
        other = std::max(other, v);
      }
    }
  } catch (const ConvergenceError&) {
    return -kInfinity;
  }
  if (own <= 0.0 && other <= 0.0) return 0.0;  // degenerate: every answer is furthest
  return own - other;
}

// Point of the segment anchor → target that is furthest toward target while
// staying in the region. The divergence is convex along the segment.
std::vector<double> clip_toward(const FamilySpec& family, const ConfidenceRegion& region,
                                const std::vector<double>& anchor,
                                const std::vector<double>& target) {
  if (region.contains(family, target)) return target;
  std::vector<double> p(anchor.size());
  auto at = [&](double s) {
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = anchor[k] + s * (target[k] - anchor[k]);
    return p;
  };
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (region.contains(family, at(mid))) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return at(lo);
}

class WitnessSearch {
 public:
  WitnessSearch(const ProblemInstance& problem, const ConfidenceRegion& region,
                const OracleOptions& oracle, const CandidateOptions& options)
      : problem_(problem), region_(region), oracle_(oracle), options_(options) {}

  std::optional<std::vector<double>> find(Answer i, const std::vector<double>* cached) {
    const FamilySpec& family = problem_.family();
    if (cached && region_.contains(family, *cached)) return *cached;

    const MinCost base = min_cost_answer(family, region_, i, problem_.alternative_offset());
    if (!(base.cost <= region_.radius)) return std::nullopt;

    std::vector<std::vector<double>> starts;
    starts.push_back(base.point);
    const MinCost strict = min_cost_answer(family, region_, i, 0.0);
    if (strict.cost <= region_.radius) starts.push_back(strict.point);
    const std::vector<double> center = box_project(family, region_.center);
    if (region_.contains(family, center)) starts.push_back(center);

    const std::size_t K = problem_.num_arms();
    const Interval box = family.box();
    if (K <= 10) {
      for (std::size_t mask = 0; mask < (std::size_t{1} << K) && starts.size() < options_.restarts;
           ++mask) {
        std::vector<double> corner(K);
        for (std::size_t k = 0; k < K; ++k) corner[k] = ((mask >> k) & 1U) ? box.hi : box.lo;
        starts.push_back(clip_toward(family, region_, base.point, corner));
      }
    }
    std::mt19937_64 rng(0x243f6a8885a308d3ULL + i);
    std::uniform_real_distribution<double> unit(box.lo, box.hi);
    while (starts.size() < options_.restarts) {
      std::vector<double> p(K);
      for (double& v : p) v = unit(rng);
      starts.push_back(clip_toward(family, region_, base.point, p));
    }

    for (const auto& s : starts) {
      if (auto w = ascend(i, s)) return w;
    }
    if (K == 2) return grid(i);
    return std::nullopt;
  }

 private:
  std::optional<std::vector<double>> accept(Answer i, const std::vector<double>& lambda) {
    if (in_furthest_set(problem_, lambda, i, oracle_)) return lambda;
    return std::nullopt;
  }

  std::optional<std::vector<double>> ascend(Answer i, std::vector<double> lambda) {
    const FamilySpec& family = problem_.family();
    const Interval box = family.box();
    double best = margin(problem_, lambda, i, oracle_);
    double step = 0.25 * box.width();
    for (std::size_t it = 0; it < options_.iterations; ++it) {
      if (best >= -oracle_.i_f_tol) {
        if (auto w = accept(i, lambda)) return w;
      }
      if (step < 1e-12 * (1.0 + box.width())) break;
      bool improved = false;
      for (std::size_t k = 0; k < lambda.size(); ++k) {
        for (double sign : {1.0, -1.0}) {
          std::vector<double> next = lambda;
          next[k] = std::clamp(lambda[k] + sign * step, box.lo, box.hi);
          if (next[k] == lambda[k] || !region_.contains(family, next)) continue;
          const double m = margin(problem_, next, i, oracle_);
          if (m > best) {
            best = m;
            lambda = std::move(next);
            improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    if (best >= -oracle_.i_f_tol) return accept(i, lambda);
    return std::nullopt;
  }

  // Exhaustive scan of the region's bounding box for two arms.
  std::optional<std::vector<double>> grid(Answer i) {
    const FamilySpec& family = problem_.family();
    const Interval box = family.box();
    double lo[2];
    double hi[2];
    for (std::size_t k = 0; k < 2; ++k) {
      // Extent of coordinate k inside the region: Σ N d ≤ radius bounds each term alone.
      const double ck = std::clamp(region_.center[k], box.lo, box.hi);
      auto inside = [&](double x) {
        return static_cast<double>(region_.counts[k]) * kl(family, region_.center[k], x) <=
               region_.radius;
      };
      auto edge = [&](double from, double to) {
        if (inside(to)) return to;
        double a = from;
        double b = to;
        for (int it = 0; it < 60; ++it) {
          const double m = 0.5 * (a + b);
          if (inside(m)) {
            a = m;
          } else {
            b = m;
          }
        }
        return a;
      };
      lo[k] = inside(ck) ? edge(ck, box.lo) : ck;
      hi[k] = inside(ck) ? edge(ck, box.hi) : ck;
    }
    const double side = std::max(hi[0] - lo[0], hi[1] - lo[1]);
    const double step = std::max(options_.grid_step,
                                 side / static_cast<double>(options_.grid_max_side));
    for (double x = lo[0]; x <= hi[0] + 1e-15; x += step) {
      for (double y = lo[1]; y <= hi[1] + 1e-15; y += step) {
        std::vector<double> p{x, y};
        if (!region_.contains(family, p)) continue;
        if (margin(problem_, p, i, oracle_) < -oracle_.i_f_tol) continue;
        if (auto w = accept(i, p)) return w;
      }
    }
    return std::nullopt;
  }

  const ProblemInstance& problem_;
  const ConfidenceRegion& region_;
  const OracleOptions& oracle_;
  const CandidateOptions& options_;
};

std::vector<Answer> resolve_order(const std::vector<Answer>& order, std::size_t n) {
  if (order.empty()) {
    std::vector<Answer> out(n);
    std::iota(out.begin(), out.end(), Answer{0});
    return out;
  }
  return order;
}

// BAI candidates exactly: answer i qualifies alone when some model in the
// region has λ_i as the strict maximum; a feasible tie makes every answer furthest.
CandidateSet bai_candidates(const ProblemInstance& problem, const ConfidenceRegion& region,
                            const OracleSolution& at_center, const OracleOptions& oracle) {
  const FamilySpec& family = problem.family();
  const std::size_t K = problem.num_arms();
  CandidateSet out;
  if (at_center.degenerate) {
    out.answers = at_center.i_f;
    return out;
  }
  for (Answer i = 0; i < K; ++i) {
    for (Answer j = i + 1; j < K; ++j) {
      const MinCost tie = min_cost_tie(family, region, i, j);
      if (tie.cost <= region.radius && in_furthest_set(problem, tie.point, 0, oracle)) {
        out.answers.resize(K);
        std::iota(out.answers.begin(), out.answers.end(), Answer{0});
        for (Answer a = 0; a < K; ++a) {
          if (!std::binary_search(at_center.i_f.begin(), at_center.i_f.end(), a)) {
            out.witnesses.emplace(a, BanditModel(tie.point));
          }
        }
        return out;
      }
    }
  }
  out.answers = at_center.i_f;
  for (Answer i = 0; i < K; ++i) {
    if (std::binary_search(at_center.i_f.begin(), at_center.i_f.end(), i)) continue;
    const MinCost best = min_cost_answer(family, region, i, 0.0);
    if (best.cost <= region.radius && in_furthest_set(problem, best.point, i, oracle)) {
      out.answers.push_back(i);
      out.witnesses.emplace(i, BanditModel(best.point));
    }
  }
  std::sort(out.answers.begin(), out.answers.end());
  return out;
}

OracleSolution solve_center(const ProblemInstance& problem, const ConfidenceRegion& region,
                            const OracleOptions& oracle) {
  return solve(problem, BanditModel(box_project(problem.family(), region.center)), oracle);
}

template <class Fn>
auto with_retry(const OracleOptions& oracle, Fn&& fn) {
  try {
    return fn(oracle);
  } catch (const ConvergenceError&) {
    OracleOptions relaxed = oracle;
    relaxed.tol *= 10.0;
    return fn(relaxed);
  }
}

}  // namespace

double ConfidenceRegion::divergence(const FamilySpec& family,
                                    std::span<const double> lambda) const {
  double total = 0.0;
  for (std::size_t k = 0; k < center.size(); ++k) {
    total += weighted_kl(family, static_cast<double>(counts[k]), center[k], lambda[k]);
  }
  return total;
}

bool ConfidenceRegion::contains(const FamilySpec& family, std::span<const double> lambda) const {
  const Interval box = family.box();
  for (double v : lambda) {
    if (!box.contains(v)) return false;
  }
  return divergence(family, lambda) <= radius;
}

ConfidenceRegion make_region(const BanditModel& emp_means,
                             const std::vector<std::uint64_t>& counts, double dk,
                             std::uint64_t t) {
  if (!(dk >= 0.0)) throw ValidationError("make_region: D_K must be nonnegative");
  if (t < 1) throw ValidationError("make_region: t must be at least 1");
  ConfidenceRegion r;
  r.center = emp_means.vec();
  r.counts = counts;
  r.radius = dk * std::log(static_cast<double>(t));
  return r;
}

CandidateSet candidate_answers(const ProblemInstance& problem, const ConfidenceRegion& region,
                               const OracleOptions& oracle, const CandidateOptions& options,
                               WitnessCache* cache) {
  if (!std::isfinite(region.radius)) throw ValidationError("candidate_answers: radius must be finite");
  const OracleSolution at_center = solve_center(problem, region, oracle);
  if (problem.kind() == ProblemKind::BestArm) {
    return bai_candidates(problem, region, at_center, oracle);
  }
  CandidateSet out;
  out.answers = at_center.i_f;
  WitnessSearch search(problem, region, oracle, options);
  for (Answer i = 0; i < problem.num_answers(); ++i) {
    if (std::binary_search(at_center.i_f.begin(), at_center.i_f.end(), i)) continue;
    const BanditModel* cached = nullptr;
    if (cache) {
      auto it = cache->witnesses.find(i);
      if (it != cache->witnesses.end()) cached = &it->second;
    }
    std::optional<std::vector<double>> w;
    if (cached) {
      const std::vector<double>& v = cached->vec();
      w = search.find(i, &v);
    } else {
      w = search.find(i, nullptr);
    }
    if (w) {
      out.answers.push_back(i);
      out.witnesses.emplace(i, BanditModel(*w));
      if (cache) cache->witnesses.insert_or_assign(i, BanditModel(*w));
    }
  }
  std::sort(out.answers.begin(), out.answers.end());
  return out;
}

Answer sticky_select(const AnswerSet& candidates, const std::vector<Answer>& order) {
  if (candidates.empty()) throw ValidationError("sticky_select: empty candidate set");
  std::size_t max_answer = *std::max_element(candidates.begin(), candidates.end());
  const std::vector<Answer> full = resolve_order(order, max_answer + 1);
  for (Answer a : full) {
    if (std::find(candidates.begin(), candidates.end(), a) != candidates.end()) return a;
  }
  throw ValidationError("sticky_select: order does not cover the candidates");
}

Answer sticky_candidate(const ProblemInstance& problem, const ConfidenceRegion& region,
                        const std::vector<Answer>& order, const OracleOptions& oracle,
                        const CandidateOptions& options, WitnessCache* cache) {
  if (problem.kind() == ProblemKind::BestArm) {
    return sticky_select(candidate_answers(problem, region, oracle, options, cache).answers,
                         order);
  }
  const OracleSolution at_center = solve_center(problem, region, oracle);
  const std::vector<Answer> full = resolve_order(order, problem.num_answers());
  WitnessSearch search(problem, region, oracle, options);
  for (Answer i : full) {
    if (std::binary_search(at_center.i_f.begin(), at_center.i_f.end(), i)) return i;
    const std::vector<double>* cached = nullptr;
    if (cache) {
      auto it = cache->witnesses.find(i);
      if (it != cache->witnesses.end()) cached = &it->second.vec();
    }
    if (auto w = search.find(i, cached)) {
      if (cache) cache->witnesses.insert_or_assign(i, BanditModel(*w));
      return i;
    }
  }
  throw ValidationError("sticky_candidate: order does not cover the furthest answers");
}

RunState::RunState(const ProblemInstance& problem, const AlgoConfig& config, std::uint64_t seed)
    : problem_(&problem),
      projection_(config.projection),
      tracker_(problem.num_arms()),
      sums_(problem.num_arms(), 0.0),
      emp_means_(std::vector<double>(problem.num_arms(), 0.0)),
      proj_means_(std::vector<double>(problem.num_arms(), 0.0)),
      rng_(seed) {}

std::uint64_t RunState::answer_switches() const noexcept {
  return selections_.empty() ? 0 : selections_.size() - 1;
}

void RunState::record_selection(Answer answer) {
  if (selections_.empty() || selections_.back().second != answer) {
    selections_.emplace_back(tracker_.t(), answer);
  }
}

void RunState::observe(std::size_t arm, double reward) {
  tracker_.record_pull(arm);
  sums_[arm] += reward;
  const double n = static_cast<double>(tracker_.counts()[arm]);
  emp_means_[arm] = sums_[arm] / n;
  if (projection_) {
    const Interval box = problem_->family().box();
    proj_means_[arm] = std::clamp(emp_means_[arm], box.lo, box.hi);
  } else {
    proj_means_[arm] = emp_means_[arm];
  }
}

namespace {

RoundResult stop_check(const RunState& state, const ProblemInstance& problem, double delta) {
  RoundResult r;
  r.glr = glr(problem, state.tracker().counts(), state.emp_means());
  r.stop = should_stop(r.glr, state.t(), delta, problem.num_arms());
  r.answer = r.glr.argmax_answer;
  return r;
}

}  // namespace

RoundResult tas_round(RunState& state, const ProblemInstance& problem, double delta,
                      const AlgoConfig& config) {
  RoundResult r = stop_check(state, problem, delta);
  if (r.stop) return r;
  const OracleSolution sol = with_retry(config.oracle, [&](const OracleOptions& o) {
    return solve(problem, state.proj_means(), o);
  });
  r.answer = sol.i_f.front();
  state.record_selection(r.answer);
  const double eps = epsilon_t(problem.num_arms(), state.t());
  r.arm = state.mutable_tracker().next_action(sol.weights.at(r.answer), eps);
  return r;
}

RoundResult stas_round(RunState& state, const ProblemInstance& problem, double delta,
                       const AlgoConfig& config) {
  RoundResult r = stop_check(state, problem, delta);
  if (r.stop) return r;
  const ConfidenceRegion region =
      make_region(state.emp_means(), state.tracker().counts(), config.dk, state.t());
  r.answer = with_retry(config.oracle, [&](const OracleOptions& o) {
    return sticky_candidate(problem, region, config.sticky_order, o, config.candidates,
                            &state.witness_cache());
  });
  state.record_selection(r.answer);
  const DValue dv = with_retry(config.oracle, [&](const OracleOptions& o) {
    return d_value(problem, state.proj_means(), r.answer, o);
  });
  const double eps = epsilon_t(problem.num_arms(), state.t());
  r.arm = state.mutable_tracker().next_action(dv.weights, eps);
  return r;
}

double sample_reward(const FamilySpec& family, double mean, std::mt19937_64& rng) {
  if (family.is_gaussian()) {
    std::normal_distribution<double> dist(mean, std::sqrt(family.sigma2()));
    return dist(rng);
  }
  std::bernoulli_distribution dist(mean);
  return dist(rng) ? 1.0 : 0.0;
}

std::vector<bool> good_event_flags(const std::vector<bool>& ok_rounds, std::uint64_t horizon,
                                   std::uint64_t stopping_time) {
  std::vector<bool> flags(horizon, true);
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    const auto first = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(t))));
    const std::uint64_t last = std::min({t, stopping_time, static_cast<std::uint64_t>(ok_rounds.size())});
    for (std::uint64_t s = first; s <= last; ++s) {
      if (!ok_rounds[s - 1]) {
        flags[t - 1] = false;
        break;
      }
    }
  }
  return flags;
}

RunRecord run(const ProblemInstance& problem, const BanditModel& true_model,
              const AlgoConfig& config, double delta, std::uint64_t seed) {
  problem.check_model(true_model);
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("run: delta must be in (0,1)");
  const AnswerSet correct = i_star(problem, true_model);
  const std::size_t K = problem.num_arms();
  const FamilySpec& family = problem.family();

  RunState state(problem, config, seed);
  RunRecord rec;
  rec.seed = seed;
  rec.delta = delta;

  std::vector<bool> ok_rounds;
  auto after_pull = [&]() {
    if (!config.good_event || state.t() > config.good_event_horizon) return;
    double z = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      z += weighted_kl(family, static_cast<double>(state.tracker().counts()[k]),
                       state.emp_means()[k], true_model[k]);
    }
    ok_rounds.push_back(z <= config.dk * std::log(static_cast<double>(state.t())));
  };
  auto pull = [&](std::size_t arm) {
    state.observe(arm, sample_reward(family, true_model[arm], state.rng()));
    after_pull();
  };

  for (std::size_t k = 0; k < K; ++k) pull(k);

  const std::uint64_t consistency_stride =
      config.trajectory_stride > 0 ? config.trajectory_stride : 97;
  GlrResult last;
  try {
    while (true) {
      const RoundResult r = config.algorithm == Algorithm::TaS
                                ? tas_round(state, problem, delta, config)
                                : stas_round(state, problem, delta, config);
      last = r.glr;
      if (config.trajectory_stride > 0 && state.t() % config.trajectory_stride == 0) {
        rec.glr_samples.push_back(GlrSample{state.t(), r.glr.statistic,
                                            beta(state.t(), delta, K), state.tracker().counts()});
      }
      if (r.stop) {
        rec.stopped = true;
        rec.recommendation = r.answer;
        break;
      }
      if (config.check_answer_consistency && config.algorithm == Algorithm::TaS &&
          state.t() % consistency_stride == 0) {
        const OracleSolution check = solve(problem, state.proj_means(), config.oracle);
        if (!std::binary_search(check.i_f.begin(), check.i_f.end(), r.answer)) {
          ++rec.consistency_violations;
        }
      }
      if (state.t() >= config.round_cap) {
        rec.recommendation = r.glr.argmax_answer;
        break;
      }
      pull(r.arm);
    }
  } catch (const ConvergenceError& e) {
    rec.aborted = true;
    rec.error = e.what();
    rec.recommendation = last.argmax_answer;
  }

  rec.stopping_time = state.t();
  rec.correct = std::binary_search(correct.begin(), correct.end(), rec.recommendation);
  rec.final_counts = state.tracker().counts();
  rec.answer_switches = state.answer_switches();
  const auto& sel = state.selections();
  rec.final_half_constant = sel.size() <= 1 || 2 * sel.back().first <= rec.stopping_time;
  if (config.good_event) {
    rec.good_event = good_event_flags(ok_rounds, config.good_event_horizon, rec.stopping_time);
  }
  return rec;
}

}  // namespace purex
