#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "purex/algorithms.hpp"
#include "purex/bounds.hpp"

namespace purex {

/// Experiment description, read from JSON. Unknown keys are rejected.
///
///   family       {kind: "gaussian"|"bernoulli", sigma2, box: [lo, hi]}
///   means        [μ_0, ..., μ_{K-1}]
///   problem      {kind: "bai"|"eps_bai", epsilon}
///   algorithm    {name: "tas"|"stas", projection, sticky_order, dk_override, oracle_tol}
///   delta        number or list
///   replications, seed, round_cap, workers
///   outputs      {records, summary, format: "jsonl"|"csv"}
///   diagnostics  {good_event, good_event_horizon, trajectory_stride, answer_consistency}
///   bounds       {compute, eps_mu}
struct ExperimentConfig {
  FamilyKind family_kind = FamilyKind::GaussianKnownVariance;
  double sigma2 = 1.0;
  Interval box{-1.0, 2.0};
  std::vector<double> means;
  ProblemKind problem_kind = ProblemKind::BestArm;
  double epsilon = 0.0;

  Algorithm algorithm = Algorithm::TaS;
  bool projection = true;
  std::vector<Answer> sticky_order;
  std::optional<double> dk_override;
  double oracle_tol = 1e-8;

  std::vector<double> deltas{0.1};
  std::uint64_t replications = 1;
  std::uint64_t seed = 0;
  std::uint64_t round_cap = 10'000'000;
  std::size_t workers = 0;  // 0: hardware concurrency

  std::string records_path;
  std::string summary_path;
  std::string format = "csv";

  bool good_event = false;
  std::uint64_t good_event_horizon = 36;
  std::uint64_t trajectory_stride = 0;
  bool answer_consistency = false;

  bool compute_bounds = true;
  std::optional<double> eps_mu;

  FamilySpec family() const;
  ProblemInstance problem() const;
  BanditModel model() const;
  /// Throws ValidationError on any inconsistency, before sampling.
  void validate() const;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& config);

/// Seed of replication `index`: two splitmix64 steps over (base, index), so
/// adding replications never changes earlier streams.
std::uint64_t replication_seed(std::uint64_t base, std::uint64_t index);

/// D_K used by the runs: the override when present, else the solved value.
double resolve_dk(const ExperimentConfig& config);

AlgoConfig make_algo_config(const ExperimentConfig& config, double dk);

RunRecord run_once(const ExperimentConfig& config, double delta, std::uint64_t index, double dk);

std::string record_to_json(const RunRecord& record);
RunRecord record_from_json(const std::string& line);

struct DeltaSummary {
  double delta = 0.0;
  std::uint64_t replications = 0;
  double mean_tau = 0.0;
  double se_tau = 0.0;
  std::uint64_t errors = 0;
  double err_rate = 0.0;
  std::uint64_t min_tau = 0;
  std::uint64_t max_tau = 0;
  std::uint64_t non_stopped = 0;
  std::uint64_t aborted = 0;
  double ratio = 0.0;        // mean_tau / log(1/δ)
  double lower_bound = 0.0;  // T*(μ) log(1/(2.4δ))
  std::optional<std::string> upper_bound;  // theorem bound, exact integer string
  double upper_bound_approx = 0.0;
  bool incomplete = false;
  // Good-event estimate Σ_t P(𝓔_t^c) over t in [4, horizon], with its binomial standard error.
  std::optional<double> good_event_sum;
  std::optional<double> good_event_se;
  friend bool operator==(const DeltaSummary&, const DeltaSummary&) = default;
};

using McSummary = std::vector<DeltaSummary>;

/// Aggregate the records of one δ, in replication order. Aborted runs count
/// toward replications only.
DeltaSummary summarize(const std::vector<RunRecord>& records, double delta,
                       double t_star_inv);

struct McOptions {
  std::size_t workers = 1;
  std::ostream* records_out = nullptr;  // one JSON line per record, in replication order
};

/// Replications for every δ of the config. Records go to `records_out` in
/// replication order whatever the worker count.
McSummary monte_carlo(const ExperimentConfig& config, const McOptions& options);

/// Runs `config.replications` seeds at one δ on `workers` threads and returns
/// the records in replication order.
std::vector<RunRecord> run_replications(const ExperimentConfig& config, double delta, double dk,
                                        std::size_t workers, std::ostream* records_out = nullptr);

/// Header: delta,replications,mean_tau,se_tau,err_rate,ratio,lower_bound,upper_bound
void write_summary_csv(std::ostream& out, const McSummary& summary);
std::string summary_to_json(const McSummary& summary);
/// One JSON object per δ per line.
void write_summary_jsonl(std::ostream& out, const McSummary& summary);

/// Parse a record stream back (one JSON object per nonblank line).
std::vector<RunRecord> read_records(std::istream& in);

}  // namespace purex
