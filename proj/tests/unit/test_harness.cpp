#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "purex/errors.hpp"
#include "purex/harness.hpp"

using namespace purex;

namespace {

const char* kBase = R"({
  "family": {"kind": "gaussian", "sigma2": 1.0, "box": [-1, 2]},
  "means": [1.0, 0.0],
  "problem": {"kind": "bai"},
  "algorithm": {"name": "tas"},
  "delta": [0.1, 0.01],
  "replications": 8,
  "seed": 7,
  "bounds": {"compute": false}
})";

ExperimentConfig base() { return parse_config(kBase); }

std::string with(const std::string& key, const nlohmann::json& value) {
  nlohmann::json j = nlohmann::json::parse(kBase);
  j[key] = value;
  return j.dump();
}

}  // namespace

TEST(Config, Parse) {
  const ExperimentConfig c = base();
  EXPECT_EQ(c.means, (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(c.deltas, (std::vector<double>{0.1, 0.01}));
  EXPECT_EQ(c.replications, 8u);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_FALSE(c.compute_bounds);
  const ExperimentConfig again = parse_config(config_to_json(c));
  EXPECT_EQ(config_to_json(again), config_to_json(c));
}

TEST(Config, Rejections) {
  EXPECT_THROW(parse_config(with("colour", "red")), ValidationError);
  EXPECT_THROW(parse_config(with("delta", 1.5)), ValidationError);
  EXPECT_THROW(parse_config(with("delta", 0.0)), ValidationError);
  EXPECT_THROW(parse_config(with("replications", 0)), ValidationError);
  EXPECT_THROW(parse_config(with("means", {1.0, 5.0})), ValidationError);
  EXPECT_THROW(parse_config(with("means", {1.0})), ValidationError);
  EXPECT_THROW(parse_config(with("algorithm", {{"name", "tas"}, {"extra", 1}})), ValidationError);
  EXPECT_THROW(parse_config("{\"means\": [1, 0]}"), ValidationError);
  EXPECT_THROW(parse_config("not json"), ValidationError);
}

TEST(Config, BernoulliDefaults) {
  const ExperimentConfig c = parse_config(R"({"family": {"kind": "bernoulli"}, "means": [0.6, 0.4]})");
  EXPECT_EQ(c.family_kind, FamilyKind::Bernoulli);
  EXPECT_DOUBLE_EQ(c.box.lo, 0.01);
  EXPECT_DOUBLE_EQ(c.box.hi, 0.99);
}

TEST(Seeds, DerivedPerReplication) {
  EXPECT_EQ(replication_seed(7, 0), replication_seed(7, 0));
  EXPECT_NE(replication_seed(7, 0), replication_seed(7, 1));
  EXPECT_NE(replication_seed(7, 0), replication_seed(8, 0));
  const ExperimentConfig c = base();
  const RunRecord a = run_once(c, 0.1, 0, 1.0);
  EXPECT_EQ(a, run_once(c, 0.1, 0, 1.0));
  EXPECT_EQ(a.seed, replication_seed(7, 0));
  EXPECT_NE(a.seed, run_once(c, 0.1, 1, 1.0).seed);
}

TEST(Records, RoundTrip) {
  ExperimentConfig c = base();
  c.good_event = true;
  c.trajectory_stride = 5;
  for (std::uint64_t i = 0; i < 5; ++i) {
    const RunRecord r = run_once(c, 0.1, i, 1.0);
    const std::string line = record_to_json(r);
    EXPECT_EQ(line.find('\n'), std::string::npos);
    EXPECT_EQ(record_from_json(line), r);
    EXPECT_EQ(record_to_json(record_from_json(line)), line);
  }
  EXPECT_THROW(record_from_json("{}"), ValidationError);
}

TEST(MonteCarlo, SerialEqualsParallel) {
  const ExperimentConfig c = base();
  std::ostringstream serial_out, parallel_out;
  const McSummary serial = monte_carlo(c, {1, &serial_out});
  const McSummary parallel = monte_carlo(c, {4, &parallel_out});
  EXPECT_EQ(serial, parallel);
  EXPECT_EQ(serial_out.str(), parallel_out.str());
  ASSERT_EQ(serial.size(), 2u);
  for (const DeltaSummary& s : serial) {
    EXPECT_EQ(s.replications, 8u);
    EXPECT_EQ(s.errors, 0u);
    EXPECT_EQ(s.err_rate, 0.0);
    EXPECT_NEAR(s.ratio, s.mean_tau / std::log(1.0 / s.delta), 1e-12);
  }
}

TEST(MonteCarlo, SummaryFromRecordFile) {
  ExperimentConfig c = base();
  c.replications = 20;
  std::ostringstream out;
  const McSummary summary = monte_carlo(c, {3, &out});
  std::istringstream in(out.str());
  const std::vector<RunRecord> records = read_records(in);
  ASSERT_EQ(records.size(), 40u);
  for (const DeltaSummary& s : summary) {
    std::vector<RunRecord> mine;
    for (const RunRecord& r : records) {
      if (r.delta == s.delta) mine.push_back(r);
    }
    const DeltaSummary again = summarize(mine, s.delta, 0.125);
    EXPECT_NEAR(again.mean_tau, s.mean_tau, 1e-12 * s.mean_tau);
    EXPECT_NEAR(again.se_tau, s.se_tau, 1e-12 * s.mean_tau);
    EXPECT_EQ(again.errors, s.errors);
    EXPECT_NEAR(again.lower_bound, s.lower_bound, 1e-12);
  }
}

TEST(Summary, Statistics) {
  std::vector<RunRecord> rs(4);
  const std::uint64_t taus[] = {10, 20, 30, 40};
  for (int i = 0; i < 4; ++i) {
    rs[i].stopping_time = taus[i];
    rs[i].stopped = true;
    rs[i].correct = i != 2;
  }
  const DeltaSummary s = summarize(rs, 0.1, 0.125);
  EXPECT_DOUBLE_EQ(s.mean_tau, 25.0);
  EXPECT_NEAR(s.se_tau, std::sqrt(500.0 / 3.0 / 4.0), 1e-12);
  EXPECT_EQ(s.errors, 1u);
  EXPECT_DOUBLE_EQ(s.err_rate, 0.25);
  EXPECT_EQ(s.min_tau, 10u);
  EXPECT_EQ(s.max_tau, 40u);
}

TEST(SummaryCsv, Layout) {
  const ExperimentConfig c = base();
  const McSummary summary = monte_carlo(c, {2, nullptr});
  std::ostringstream csv;
  write_summary_csv(csv, summary);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "delta,replications,mean_tau,se_tau,err_rate,ratio,lower_bound,upper_bound");
  int rows = 0;
  while (std::getline(lines, line)) {
    if (!line.empty()) ++rows;
  }
  EXPECT_EQ(rows, 2);
  std::ostringstream jsonl;
  write_summary_jsonl(jsonl, summary);
  const std::string text = jsonl.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
}
