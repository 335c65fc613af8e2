#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "purex/algorithm_kind.hpp"
#include "purex/oracle.hpp"
#include "purex/problems.hpp"
#include "purex/stopping.hpp"
#include "purex/tracking.hpp"

namespace purex {

struct CandidateOptions {
  std::size_t restarts = 16;
  std::size_t iterations = 200;
  double grid_step = 1e-3;        // K = 2 fallback grid
  std::size_t grid_max_side = 64;  // coarser step when the region is wide
};

struct AlgoConfig {
  Algorithm algorithm = Algorithm::TaS;
  bool projection = true;
  std::vector<Answer> sticky_order;  // empty: ascending index
  double dk = 1.0;                   // confidence-region scale D_K (S-TaS, good event)
  OracleOptions oracle;
  CandidateOptions candidates;
  std::uint64_t round_cap = 10'000'000;
  bool good_event = false;
  std::uint64_t good_event_horizon = 36;
  std::uint64_t trajectory_stride = 0;  // 0: no GLR samples
  bool check_answer_consistency = false;
};

/// C_t = {λ in the box : Σ_k N_k d(center_k, λ_k) ≤ radius}.
struct ConfidenceRegion {
  std::vector<double> center;
  std::vector<std::uint64_t> counts;
  double radius = 0.0;

  double divergence(const FamilySpec& family, std::span<const double> lambda) const;
  bool contains(const FamilySpec& family, std::span<const double> lambda) const;
};

ConfidenceRegion make_region(const BanditModel& emp_means,
                             const std::vector<std::uint64_t>& counts, double dk,
                             std::uint64_t t);

/// Witnesses found by earlier searches, keyed by answer. A cached witness is
/// reused while it stays inside the region.
struct WitnessCache {
  std::map<Answer, BanditModel> witnesses;
};

struct CandidateSet {
  AnswerSet answers;
  std::map<Answer, BanditModel> witnesses;  // for answers beyond i_F of the center
};

/// 𝓘_t = ∪_{λ ∈ C_t} i_F(λ), searched. Always contains i_F(box_project(center)).
/// BAI is decided exactly; ε-BAI uses multi-start coordinate ascent on the
/// i_F margin and may under-approximate.
CandidateSet candidate_answers(const ProblemInstance& problem, const ConfidenceRegion& region,
                               const OracleOptions& oracle, const CandidateOptions& options = {},
                               WitnessCache* cache = nullptr);

/// Order-minimal candidate. Throws ValidationError on an empty set.
Answer sticky_select(const AnswerSet& candidates, const std::vector<Answer>& order);

/// sticky_select(candidate_answers(...), order) without searching past the
/// first answer that qualifies.
Answer sticky_candidate(const ProblemInstance& problem, const ConfidenceRegion& region,
                        const std::vector<Answer>& order, const OracleOptions& oracle,
                        const CandidateOptions& options, WitnessCache* cache);

struct GoodEventTrace {
  std::vector<bool> ok;  // ok[s-1]: Σ N_k(s) d(μ̂_k(s), μ_k) ≤ D_K log s
};

class RunState {
 public:
  RunState(const ProblemInstance& problem, const AlgoConfig& config, std::uint64_t seed);

  const TrackerState& tracker() const noexcept { return tracker_; }
  const BanditModel& emp_means() const noexcept { return emp_means_; }
  /// μ̃(t): the box projection in projected mode, else μ̂(t).
  const BanditModel& proj_means() const noexcept { return proj_means_; }
  std::uint64_t t() const noexcept { return tracker_.t(); }

  /// Selected answers as (round, answer) change points.
  const std::vector<std::pair<std::uint64_t, Answer>>& selections() const noexcept {
    return selections_;
  }
  std::uint64_t answer_switches() const noexcept;

  void record_selection(Answer answer);
  void observe(std::size_t arm, double reward);
  std::mt19937_64& rng() noexcept { return rng_; }
  TrackerState& mutable_tracker() noexcept { return tracker_; }
  WitnessCache& witness_cache() noexcept { return cache_; }

 private:
  const ProblemInstance* problem_;
  bool projection_;
  TrackerState tracker_;
  std::vector<double> sums_;
  BanditModel emp_means_;
  BanditModel proj_means_;
  std::vector<std::pair<std::uint64_t, Answer>> selections_;
  std::mt19937_64 rng_;
  WitnessCache cache_;
};

struct RoundResult {
  bool stop = false;
  std::size_t arm = 0;     // valid when !stop
  Answer answer = 0;       // recommendation when stop, else i_t
  GlrResult glr;
};

RoundResult tas_round(RunState& state, const ProblemInstance& problem, double delta,
                      const AlgoConfig& config);
RoundResult stas_round(RunState& state, const ProblemInstance& problem, double delta,
                       const AlgoConfig& config);

struct GlrSample {
  std::uint64_t t = 0;
  double statistic = 0.0;
  double threshold = 0.0;
  std::vector<std::uint64_t> counts;
  friend bool operator==(const GlrSample&, const GlrSample&) = default;
};

struct RunRecord {
  std::uint64_t replication = 0;
  std::uint64_t seed = 0;
  double delta = 0.0;
  std::uint64_t stopping_time = 0;
  bool stopped = false;
  Answer recommendation = 0;
  bool correct = false;
  bool aborted = false;
  std::string error;
  std::vector<std::uint64_t> final_counts;
  std::uint64_t answer_switches = 0;
  bool final_half_constant = true;
  std::uint64_t consistency_violations = 0;
  std::vector<bool> good_event;  // good_event[t-1] = 𝓔_t held (t ≤ horizon)
  std::vector<GlrSample> glr_samples;
  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Draw one reward from the arm with mean `mean`.
double sample_reward(const FamilySpec& family, double mean, std::mt19937_64& rng);

/// Full run: pull each arm once, then rounds until the GLR stop or the round cap.
/// Oracle failures are retried once at 10× the tolerance; a second failure
/// ends the run with `aborted` set.
RunRecord run(const ProblemInstance& problem, const BanditModel& true_model,
              const AlgoConfig& config, double delta, std::uint64_t seed);

/// 𝓔_t flags for t = 1..horizon from per-round concentration checks.
std::vector<bool> good_event_flags(const std::vector<bool>& ok_rounds, std::uint64_t horizon,
                                   std::uint64_t stopping_time);

}  // namespace purex
