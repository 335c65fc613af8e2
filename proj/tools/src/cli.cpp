#include "purex_cli/cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "purex/bounds.hpp"
#include "purex/errors.hpp"
#include "purex/harness.hpp"
#include "purex/oracle.hpp"
#include "purex/selftest.hpp"
#include "purex/tracking.hpp"

namespace purex {

namespace {

using nlohmann::ordered_json;

// Flags shared by every subcommand that needs an instance.
struct InstanceFlags {
  std::string config;
  std::vector<double> means;
  std::string family;
  std::optional<double> sigma2;
  std::vector<double> box;
  std::string problem;
  std::optional<double> epsilon;
  std::optional<std::uint64_t> seed;
  std::vector<double> deltas;
  std::optional<double> dk_override;
  std::optional<std::string> algorithm;
  bool raw = false;

  void add(CLI::App* app, bool with_run_flags) {
    app->add_option("--config", config, "JSON experiment config");
    app->add_option("--means", means, "arm means, overrides the config")->delimiter(',');
    app->add_option("--family", family, "gaussian or bernoulli")
        ->check(CLI::IsMember({"gaussian", "bernoulli"}));
    app->add_option("--sigma2", sigma2, "Gaussian variance");
    app->add_option("--box", box, "mean box lo,hi")->delimiter(',')->expected(2);
    app->add_option("--problem", problem, "bai or eps_bai")
        ->check(CLI::IsMember({"bai", "eps_bai"}));
    app->add_option("--eps", epsilon, "epsilon for eps_bai");
    app->add_option("--delta", deltas, "risk level(s)")->delimiter(',');
    app->add_option("--dk-override", dk_override, "confidence-region scale D_K");
    app->add_option("--algorithm", algorithm, "tas or stas")
        ->check(CLI::IsMember({"tas", "stas"}));
    app->add_flag("--raw", raw, "disable the box projection of the empirical means");
    if (with_run_flags) app->add_option("--seed", seed, "base seed");
  }

  ExperimentConfig build() const {
    ExperimentConfig c;
    if (!config.empty()) c = load_config(config);
    if (!family.empty()) {
      c.family_kind = family == "bernoulli" ? FamilyKind::Bernoulli : FamilyKind::GaussianKnownVariance;
      if (c.family_kind == FamilyKind::Bernoulli) c.sigma2 = 0.25;
    }
    if (sigma2) c.sigma2 = *sigma2;
    if (!means.empty()) c.means = means;
    if (box.size() == 2) {
      c.box = Interval{box[0], box[1]};
    } else if (config.empty() && !c.means.empty()) {
      if (c.family_kind == FamilyKind::Bernoulli) {
        c.box = Interval{0.01, 0.99};
      } else {
        const auto [lo, hi] = std::minmax_element(c.means.begin(), c.means.end());
        c.box = Interval{*lo - 1.0, *hi + 1.0};
      }
    }
    if (!problem.empty()) {
      c.problem_kind = problem == "bai" ? ProblemKind::BestArm : ProblemKind::EpsilonBestArm;
      if (c.problem_kind == ProblemKind::BestArm) c.epsilon = 0.0;
    }
    if (epsilon) {
      c.epsilon = *epsilon;
      if (problem.empty()) c.problem_kind = ProblemKind::EpsilonBestArm;
    }
    if (seed) c.seed = *seed;
    if (!deltas.empty()) c.deltas = deltas;
    if (dk_override) c.dk_override = *dk_override;
    if (algorithm) c.algorithm = *algorithm == "stas" ? Algorithm::STaS : Algorithm::TaS;
    if (raw) c.projection = false;
    if (c.means.empty()) throw ValidationError("no means given (use --config or --means)");
    c.validate();
    return c;
  }
};

ordered_json solution_json(const OracleSolution& s) {
  ordered_json j;
  j["t_star_inv"] = s.t_star_inv;
  j["t_star"] = s.t_star_inv > 0.0 ? ordered_json(1.0 / s.t_star_inv) : ordered_json(nullptr);
  j["d_values"] = s.d_values;
  j["i_f"] = s.i_f;
  ordered_json w = ordered_json::object();
  for (const auto& [i, v] : s.weights) w[std::to_string(i)] = v;
  j["weights"] = w;
  j["gap"] = s.gap;
  j["degenerate"] = s.degenerate;
  return j;
}

class OutputTarget {
 public:
  OutputTarget(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw ValidationError("cannot open output file " + path);
      out_ = &file_;
    }
  }
  std::ostream& stream() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Track-and-Stop and Sticky Track-and-Stop for pure-exploration bandits", "purex"};
  app.require_subcommand(1);

  InstanceFlags oracle_flags;
  std::string method = "equalization";
  double tol = 1e-8;
  auto* oracle_cmd = app.add_subcommand("oracle", "solve the characteristic-time game at a model");
  oracle_flags.add(oracle_cmd, false);
  oracle_cmd->add_option("--method", method, "equalization or frank-wolfe")
      ->check(CLI::IsMember({"equalization", "frank-wolfe"}));
  oracle_cmd->add_option("--tol", tol, "certified duality gap");

  InstanceFlags run_flags;
  std::uint64_t replication = 0;
  std::string run_out;
  bool run_good_event = false;
  std::uint64_t stride = 0;
  auto* run_cmd = app.add_subcommand("run", "one seeded run, printed as a JSON record");
  run_flags.add(run_cmd, true);
  run_cmd->add_option("--replication", replication, "replication index (seed stream)");
  run_cmd->add_option("--out", run_out, "record file (default stdout)");
  run_cmd->add_flag("--diag-good-event", run_good_event, "evaluate the good event");
  run_cmd->add_option("--trajectory-stride", stride, "sample the GLR curve every N rounds");

  InstanceFlags mc_flags;
  std::optional<std::uint64_t> reps;
  std::optional<std::size_t> workers;
  std::string mc_out;
  std::string mc_records;
  std::string mc_format;
  bool mc_good_event = false;
  auto* mc_cmd = app.add_subcommand("mc", "Monte-Carlo sweep over delta");
  mc_flags.add(mc_cmd, true);
  mc_cmd->add_option("--replications", reps, "replications per delta");
  mc_cmd->add_option("--workers", workers, "worker threads (0: all cores)");
  mc_cmd->add_option("--out", mc_out, "summary file (default stdout)");
  mc_cmd->add_option("--records", mc_records, "record file (default: config outputs.records)");
  mc_cmd->add_option("--format", mc_format, "summary format")
      ->check(CLI::IsMember({"jsonl", "csv"}));
  mc_cmd->add_flag("--diag-good-event", mc_good_event, "evaluate the good event");

  InstanceFlags bound_flags;
  std::optional<double> eps_mu;
  auto* bounds_cmd = app.add_subcommand("bounds", "theorem upper bound and instance lower bound");
  bound_flags.add(bounds_cmd, false);
  bounds_cmd->add_option("--eps-mu", eps_mu, "neighbourhood radius; probed when absent");

  std::vector<double> weights;
  std::optional<double> proj_eps;
  std::optional<std::uint64_t> proj_t;
  auto* project_cmd = app.add_subcommand("project", "linf projection onto the clipped simplex");
  project_cmd->add_option("--weights", weights, "simplex vector")->delimiter(',')->required();
  project_cmd->add_option("--eps", proj_eps, "lower bound on every coordinate");
  project_cmd->add_option("--t", proj_t, "use the forced-exploration level at round t");

  auto* selftest_cmd = app.add_subcommand("selftest", "quick invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return 0;
    err << app.help();
    return 1;
  }

  try {
    if (oracle_cmd->parsed()) {
      const ExperimentConfig c = oracle_flags.build();
      OracleOptions o;
      o.tol = tol;
      o.method = method == "frank-wolfe" ? OracleMethod::FrankWolfe : OracleMethod::Equalization;
      out << std::setprecision(17) << solution_json(solve(c.problem(), c.model(), o)).dump(2)
          << '\n';
    } else if (run_cmd->parsed()) {
      ExperimentConfig c = run_flags.build();
      if (run_good_event) c.good_event = true;
      if (stride) c.trajectory_stride = stride;
      const double dk = resolve_dk(c);
      const RunRecord rec = run_once(c, c.deltas.front(), replication, dk);
      OutputTarget target(run_out, out);
      target.stream() << record_to_json(rec) << '\n';
    } else if (mc_cmd->parsed()) {
      ExperimentConfig c = mc_flags.build();
      if (reps) c.replications = *reps;
      if (workers) c.workers = *workers;
      if (mc_good_event) c.good_event = true;
      if (!mc_format.empty()) c.format = mc_format;
      if (!mc_records.empty()) c.records_path = mc_records;
      if (!mc_out.empty()) c.summary_path = mc_out;
      c.validate();
      std::ofstream records;
      McOptions opts;
      opts.workers = c.workers;
      if (!c.records_path.empty()) {
        records.open(c.records_path);
        if (!records) throw ValidationError("cannot open record file " + c.records_path);
        opts.records_out = &records;
      }
      const McSummary summary = monte_carlo(c, opts);
      OutputTarget target(c.summary_path, out);
      if (c.format == "csv") {
        write_summary_csv(target.stream(), summary);
      } else {
        write_summary_jsonl(target.stream(), summary);
      }
    } else if (bounds_cmd->parsed()) {
      const ExperimentConfig c = bound_flags.build();
      OracleOptions o;
      o.tol = c.oracle_tol;
      BoundInputs in{c.problem(), c.model(), c.dk_override, eps_mu ? eps_mu : c.eps_mu, o};
      for (double delta : c.deltas) {
        const std::string report = to_json(theorem_bound(in, delta, c.algorithm, !c.projection));
        out << ordered_json::parse(report).dump() << '\n';
      }
    } else if (project_cmd->parsed()) {
      double eps = 0.0;
      if (proj_eps) {
        eps = *proj_eps;
      } else if (proj_t) {
        eps = epsilon_t(weights.size(), *proj_t);
      } else {
        throw ValidationError("project: give --eps or --t");
      }
      const std::vector<double> p = linf_project(weights, eps);
      ordered_json j;
      j["eps"] = eps;
      j["projected"] = p;
      out << std::setprecision(17) << j.dump() << '\n';
    } else if (selftest_cmd->parsed()) {
      return run_selftest(out) == 0 ? 0 : 2;
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace purex
