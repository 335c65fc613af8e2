#include "purex/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <fstream>
#include <iomanip>
#include <istream>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>
#include "purex/errors.hpp"

namespace purex {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ValidationError("config: " + where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ValidationError("config: unknown key '" + it.key() + "' in " + where);
    }
  }
}

template <class T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError("config: bad value for " + where + "." + key + ": " + e.what());
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

FamilySpec ExperimentConfig::family() const {
  return family_kind == FamilyKind::Bernoulli ? FamilySpec::bernoulli(box)
                                              : FamilySpec::gaussian(sigma2, box);
}

ProblemInstance ExperimentConfig::problem() const {
  return problem_kind == ProblemKind::BestArm
             ? ProblemInstance::best_arm(family(), means.size())
             : ProblemInstance::epsilon_best_arm(family(), means.size(), epsilon);
}

BanditModel ExperimentConfig::model() const { return BanditModel(means); }

void ExperimentConfig::validate() const {
  const ProblemInstance p = problem();
  const BanditModel m = model();
  p.check_model(m);
  for (double v : means) {
    if (!box.contains(v)) throw ValidationError("config: means must lie in the box");
  }
  i_star(p, m);
  if (replications < 1) throw ValidationError("config: replications must be at least 1");
  if (deltas.empty()) throw ValidationError("config: at least one delta is required");
  for (double d : deltas) {
    if (!(d > 0.0 && d < 1.0)) throw ValidationError("config: delta must be in (0,1)");
  }
  if (round_cap < means.size()) throw ValidationError("config: round_cap below K");
  if (!(oracle_tol > 0.0)) throw ValidationError("config: oracle_tol must be positive");
  if (dk_override && !(*dk_override >= 0.0)) {
    throw ValidationError("config: dk_override must be nonnegative");
  }
  if (eps_mu && !(*eps_mu > 0.0)) throw ValidationError("config: eps_mu must be positive");
  if (format != "jsonl" && format != "csv") {
    throw ValidationError("config: format must be jsonl or csv");
  }
  if (!sticky_order.empty()) {
    std::vector<Answer> sorted = sticky_order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      if (sorted.size() != means.size() || sorted[k] != k) {
        throw ValidationError("config: sticky_order must be a permutation of 0..K-1");
      }
    }
  }
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  reject_unknown(j, {"family", "means", "problem", "algorithm", "delta", "replications", "seed",
                     "round_cap", "workers", "outputs", "diagnostics", "bounds"},
                 "root");
  ExperimentConfig c;

  if (!j.contains("family")) throw ValidationError("config: missing key 'family'");
  const json& fam = j.at("family");
  reject_unknown(fam, {"kind", "sigma2", "box"}, "family");
  const auto kind = get<std::string>(fam, "kind", "family");
  if (kind == "gaussian") {
    c.family_kind = FamilyKind::GaussianKnownVariance;
    if (fam.contains("sigma2")) c.sigma2 = get<double>(fam, "sigma2", "family");
  } else if (kind == "bernoulli") {
    c.family_kind = FamilyKind::Bernoulli;
    c.sigma2 = 0.25;
    if (fam.contains("sigma2")) throw ValidationError("config: bernoulli family has fixed sigma2");
  } else {
    throw ValidationError("config: family.kind must be gaussian or bernoulli");
  }
  if (fam.contains("box")) {
    const auto b = get<std::vector<double>>(fam, "box", "family");
    if (b.size() != 2) throw ValidationError("config: family.box must be [lo, hi]");
    c.box = Interval{b[0], b[1]};
  } else if (c.family_kind == FamilyKind::Bernoulli) {
    c.box = Interval{0.01, 0.99};
  }

  c.means = get<std::vector<double>>(j, "means", "root");

  if (j.contains("problem")) {
    const json& p = j.at("problem");
    reject_unknown(p, {"kind", "epsilon"}, "problem");
    const auto pk = get<std::string>(p, "kind", "problem");
    if (pk == "bai") {
      c.problem_kind = ProblemKind::BestArm;
      if (p.contains("epsilon")) throw ValidationError("config: bai takes no epsilon");
    } else if (pk == "eps_bai") {
      c.problem_kind = ProblemKind::EpsilonBestArm;
      c.epsilon = get<double>(p, "epsilon", "problem");
    } else {
      throw ValidationError("config: problem.kind must be bai or eps_bai");
    }
  }

  if (j.contains("algorithm")) {
    const json& a = j.at("algorithm");
    reject_unknown(a, {"name", "projection", "sticky_order", "dk_override", "oracle_tol"},
                   "algorithm");
    if (a.contains("name")) {
      const auto name = get<std::string>(a, "name", "algorithm");
      if (name == "tas") {
        c.algorithm = Algorithm::TaS;
      } else if (name == "stas") {
        c.algorithm = Algorithm::STaS;
      } else {
        throw ValidationError("config: algorithm.name must be tas or stas");
      }
    }
    if (a.contains("projection")) c.projection = get<bool>(a, "projection", "algorithm");
    if (a.contains("sticky_order")) {
      c.sticky_order = get<std::vector<Answer>>(a, "sticky_order", "algorithm");
    }
    if (a.contains("dk_override") && !a.at("dk_override").is_null()) {
      c.dk_override = get<double>(a, "dk_override", "algorithm");
    }
    if (a.contains("oracle_tol")) c.oracle_tol = get<double>(a, "oracle_tol", "algorithm");
  }

  if (j.contains("delta")) {
    const json& d = j.at("delta");
    c.deltas = d.is_array() ? get<std::vector<double>>(j, "delta", "root")
                            : std::vector<double>{get<double>(j, "delta", "root")};
  }
  if (j.contains("replications")) c.replications = get<std::uint64_t>(j, "replications", "root");
  if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed", "root");
  if (j.contains("round_cap")) c.round_cap = get<std::uint64_t>(j, "round_cap", "root");
  if (j.contains("workers")) c.workers = get<std::size_t>(j, "workers", "root");

  if (j.contains("outputs")) {
    const json& o = j.at("outputs");
    reject_unknown(o, {"records", "summary", "format"}, "outputs");
    if (o.contains("records")) c.records_path = get<std::string>(o, "records", "outputs");
    if (o.contains("summary")) c.summary_path = get<std::string>(o, "summary", "outputs");
    if (o.contains("format")) c.format = get<std::string>(o, "format", "outputs");
  }
  if (j.contains("diagnostics")) {
    const json& d = j.at("diagnostics");
    reject_unknown(d, {"good_event", "good_event_horizon", "trajectory_stride", "answer_consistency"},
                   "diagnostics");
    if (d.contains("good_event")) c.good_event = get<bool>(d, "good_event", "diagnostics");
    if (d.contains("good_event_horizon")) {
      c.good_event_horizon = get<std::uint64_t>(d, "good_event_horizon", "diagnostics");
    }
    if (d.contains("trajectory_stride")) {
      c.trajectory_stride = get<std::uint64_t>(d, "trajectory_stride", "diagnostics");
    }
    if (d.contains("answer_consistency")) {
      c.answer_consistency = get<bool>(d, "answer_consistency", "diagnostics");
    }
  }
  if (j.contains("bounds")) {
    const json& b = j.at("bounds");
    reject_unknown(b, {"compute", "eps_mu"}, "bounds");
    if (b.contains("compute")) c.compute_bounds = get<bool>(b, "compute", "bounds");
    if (b.contains("eps_mu") && !b.at("eps_mu").is_null()) c.eps_mu = get<double>(b, "eps_mu", "bounds");
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["family"]["kind"] = c.family_kind == FamilyKind::Bernoulli ? "bernoulli" : "gaussian";
  if (c.family_kind == FamilyKind::GaussianKnownVariance) j["family"]["sigma2"] = c.sigma2;
  j["family"]["box"] = {c.box.lo, c.box.hi};
  j["means"] = c.means;
  j["problem"]["kind"] = c.problem_kind == ProblemKind::BestArm ? "bai" : "eps_bai";
  if (c.problem_kind == ProblemKind::EpsilonBestArm) j["problem"]["epsilon"] = c.epsilon;
  j["algorithm"]["name"] = std::string(to_string(c.algorithm));
  j["algorithm"]["projection"] = c.projection;
  j["algorithm"]["sticky_order"] = c.sticky_order;
  j["algorithm"]["dk_override"] = c.dk_override ? json(*c.dk_override) : json(nullptr);
  j["algorithm"]["oracle_tol"] = c.oracle_tol;
  j["delta"] = c.deltas;
  j["replications"] = c.replications;
  j["seed"] = c.seed;
  j["round_cap"] = c.round_cap;
  j["workers"] = c.workers;
  j["outputs"]["records"] = c.records_path;
  j["outputs"]["summary"] = c.summary_path;
  j["outputs"]["format"] = c.format;
  j["diagnostics"]["good_event"] = c.good_event;
  j["diagnostics"]["good_event_horizon"] = c.good_event_horizon;
  j["diagnostics"]["trajectory_stride"] = c.trajectory_stride;
  j["diagnostics"]["answer_consistency"] = c.answer_consistency;
  j["bounds"]["compute"] = c.compute_bounds;
  j["bounds"]["eps_mu"] = c.eps_mu ? json(*c.eps_mu) : json(nullptr);
  return j.dump(2);
}

std::uint64_t replication_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(splitmix64(base) ^ index);
}

double resolve_dk(const ExperimentConfig& config) {
  if (config.dk_override) return *config.dk_override;
  return solve_dk(config.means.size());
}

AlgoConfig make_algo_config(const ExperimentConfig& c, double dk) {
  AlgoConfig a;
  a.algorithm = c.algorithm;
  a.projection = c.projection;
  a.sticky_order = c.sticky_order;
  a.dk = dk;
  a.oracle.tol = c.oracle_tol;
  a.round_cap = c.round_cap;
  a.good_event = c.good_event;
  a.good_event_horizon = c.good_event_horizon;
  a.trajectory_stride = c.trajectory_stride;
  a.check_answer_consistency = c.answer_consistency;
  return a;
}

RunRecord run_once(const ExperimentConfig& config, double delta, std::uint64_t index,
                   double dk) {
  const ProblemInstance problem = config.problem();
  const std::uint64_t seed = replication_seed(config.seed, index);
  RunRecord rec = run(problem, config.model(), make_algo_config(config, dk), delta, seed);
  rec.replication = index;
  return rec;
}

std::string record_to_json(const RunRecord& r) {
  ordered_json j;
  j["replication"] = r.replication;
  j["seed"] = r.seed;
  j["delta"] = r.delta;
  j["stopping_time"] = r.stopping_time;
  j["stopped"] = r.stopped;
  j["recommendation"] = r.recommendation;
  j["correct"] = r.correct;
  j["aborted"] = r.aborted;
  j["error"] = r.error;
  j["final_counts"] = r.final_counts;
  j["answer_switches"] = r.answer_switches;
  j["final_half_constant"] = r.final_half_constant;
  j["consistency_violations"] = r.consistency_violations;
  j["good_event"] = r.good_event;
  ordered_json samples = ordered_json::array();
  for (const GlrSample& s : r.glr_samples) {
    samples.push_back({{"t", s.t}, {"statistic", s.statistic}, {"threshold", s.threshold},
                       {"counts", s.counts}});
  }
  j["glr_samples"] = samples;
  return j.dump();
}

RunRecord record_from_json(const std::string& line) {
  RunRecord r;
  try {
    const json j = json::parse(line);
    r.replication = j.at("replication").get<std::uint64_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.delta = j.at("delta").get<double>();
    r.stopping_time = j.at("stopping_time").get<std::uint64_t>();
    r.stopped = j.at("stopped").get<bool>();
    r.recommendation = j.at("recommendation").get<Answer>();
    r.correct = j.at("correct").get<bool>();
    r.aborted = j.at("aborted").get<bool>();
    r.error = j.at("error").get<std::string>();
    r.final_counts = j.at("final_counts").get<std::vector<std::uint64_t>>();
    r.answer_switches = j.at("answer_switches").get<std::uint64_t>();
    r.final_half_constant = j.at("final_half_constant").get<bool>();
    r.consistency_violations = j.at("consistency_violations").get<std::uint64_t>();
    r.good_event = j.at("good_event").get<std::vector<bool>>();
    for (const json& s : j.at("glr_samples")) {
      r.glr_samples.push_back(GlrSample{s.at("t").get<std::uint64_t>(),
                                        s.at("statistic").get<double>(),
                                        s.at("threshold").get<double>(),
                                        s.at("counts").get<std::vector<std::uint64_t>>()});
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("record: ") + e.what());
  }
  return r;
}

std::vector<RunRecord> read_records(std::istream& in) {
  std::vector<RunRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(record_from_json(line));
  }
  return out;
}

DeltaSummary summarize(const std::vector<RunRecord>& records, double delta, double t_star_inv) {
  DeltaSummary s;
  s.delta = delta;
  s.replications = records.size();
  std::vector<double> taus;
  std::vector<std::uint64_t> ge_fail;
  std::uint64_t ge_runs = 0;
  for (const RunRecord& r : records) {
    if (r.aborted) {
      ++s.aborted;
      continue;
    }
    if (!r.stopped) ++s.non_stopped;
    if (!r.correct) ++s.errors;
    taus.push_back(static_cast<double>(r.stopping_time));
    if (s.min_tau == 0 || r.stopping_time < s.min_tau) s.min_tau = r.stopping_time;
    s.max_tau = std::max(s.max_tau, r.stopping_time);
    if (!r.good_event.empty()) {
      if (ge_fail.size() < r.good_event.size()) ge_fail.resize(r.good_event.size(), 0);
      for (std::size_t t = 0; t < r.good_event.size(); ++t) ge_fail[t] += r.good_event[t] ? 0 : 1;
      ++ge_runs;
    }
  }
  s.incomplete = s.aborted > 0;
  const double n = static_cast<double>(taus.size());
  if (!taus.empty()) {
    double sum = 0.0;
    for (double v : taus) sum += v;
    s.mean_tau = sum / n;
    if (taus.size() > 1) {
      double ss = 0.0;
      for (double v : taus) ss += (v - s.mean_tau) * (v - s.mean_tau);
      s.se_tau = std::sqrt(ss / (n - 1.0) / n);
    }
  }
  s.err_rate = s.replications ? static_cast<double>(s.errors) / static_cast<double>(s.replications)
                              : 0.0;
  s.ratio = s.mean_tau / std::log(1.0 / delta);
  s.lower_bound = char_time_lower_bound(t_star_inv, delta);
  if (ge_runs > 0) {
    // Σ_t p̂_t over t ≥ 4. Its standard error is at most the sum of the per-t ones.
    double sum = 0.0;
    double sd_sum = 0.0;
    const double m = static_cast<double>(ge_runs);
    for (std::size_t t = 4; t <= ge_fail.size(); ++t) {
      const double p = static_cast<double>(ge_fail[t - 1]) / m;
      sum += p;
      sd_sum += std::sqrt(p * (1.0 - p) / m);
    }
    s.good_event_sum = sum;
    s.good_event_se = sd_sum;
  }
  return s;
}

std::vector<RunRecord> run_replications(const ExperimentConfig& config, double delta, double dk,
                                        std::size_t workers, std::ostream* records_out) {
  const std::uint64_t n = config.replications;
  std::vector<std::optional<RunRecord>> slots(n);
  std::mutex mu;
  std::condition_variable ready;
  std::atomic<std::uint64_t> next{0};

  auto worker = [&]() {
    while (true) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= n) return;
      RunRecord rec;
      try {
        rec = run_once(config, delta, i, dk);
      } catch (const std::exception& e) {
        rec.replication = i;
        rec.seed = replication_seed(config.seed, i);
        rec.delta = delta;
        rec.aborted = true;
        rec.error = e.what();
      }
      {
        std::lock_guard<std::mutex> lock(mu);
        slots[i] = std::move(rec);
      }
      ready.notify_all();
    }
  };

  workers = std::max<std::size_t>(1, std::min<std::size_t>(workers, n));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);

  std::vector<RunRecord> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::unique_lock<std::mutex> lock(mu);
    ready.wait(lock, [&] { return slots[i].has_value(); });
    RunRecord rec = std::move(*slots[i]);
    slots[i].reset();
    lock.unlock();
    if (records_out) *records_out << record_to_json(rec) << '\n';
    out.push_back(std::move(rec));
  }
  for (std::thread& t : pool) t.join();
  if (records_out) records_out->flush();
  return out;
}

McSummary monte_carlo(const ExperimentConfig& config, const McOptions& options) {
  config.validate();
  const ProblemInstance problem = config.problem();
  const BanditModel model = config.model();
  OracleOptions oracle;
  oracle.tol = config.oracle_tol;
  const double t_star_inv = solve(problem, model, oracle).t_star_inv;
  const double dk = resolve_dk(config);
  std::size_t workers = options.workers;
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());

  McSummary summary;
  for (double delta : config.deltas) {
    const auto records = run_replications(config, delta, dk, workers, options.records_out);
    DeltaSummary s = summarize(records, delta, t_star_inv);
    if (config.compute_bounds) {
      BoundInputs in{problem, model, config.dk_override, config.eps_mu, oracle};
      const BoundReport b = theorem_bound(in, delta, config.algorithm, !config.projection);
      s.upper_bound = to_integer_string(b.upper_bound);
      s.upper_bound_approx = b.upper_bound.convert_to<double>();
    }
    summary.push_back(std::move(s));
  }
  return summary;
}

void write_summary_csv(std::ostream& out, const McSummary& summary) {
  out << "delta,replications,mean_tau,se_tau,err_rate,ratio,lower_bound,upper_bound\n";
  for (const DeltaSummary& s : summary) {
    std::ostringstream row;
    row << std::setprecision(17) << s.delta << ',' << s.replications << ',' << s.mean_tau << ','
        << s.se_tau << ',' << s.err_rate << ',' << s.ratio << ',' << s.lower_bound << ','
        << (s.upper_bound ? *s.upper_bound : std::string("nan"));
    out << row.str() << '\n';
  }
}

namespace {

ordered_json summary_row(const DeltaSummary& s) {
  ordered_json j;
  j["delta"] = s.delta;
  j["replications"] = s.replications;
  j["mean_tau"] = s.mean_tau;
  j["se_tau"] = s.se_tau;
  j["errors"] = s.errors;
  j["err_rate"] = s.err_rate;
  j["min_tau"] = s.min_tau;
  j["max_tau"] = s.max_tau;
  j["non_stopped"] = s.non_stopped;
  j["aborted"] = s.aborted;
  j["ratio"] = s.ratio;
  j["lower_bound"] = s.lower_bound;
  j["upper_bound"] = s.upper_bound ? json(*s.upper_bound) : json(nullptr);
  j["upper_bound_approx"] = s.upper_bound ? json(s.upper_bound_approx) : json(nullptr);
  j["incomplete"] = s.incomplete;
  if (s.good_event_sum) {
    j["good_event_sum"] = *s.good_event_sum;
    j["good_event_se"] = *s.good_event_se;
  }
  return j;
}

}  // namespace

std::string summary_to_json(const McSummary& summary) {
  ordered_json arr = ordered_json::array();
  for (const DeltaSummary& s : summary) arr.push_back(summary_row(s));
  return arr.dump(2);
}

void write_summary_jsonl(std::ostream& out, const McSummary& summary) {
  for (const DeltaSummary& s : summary) out << summary_row(s).dump() << '\n';
}

}  // namespace purex
