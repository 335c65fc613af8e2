#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "purex/algorithms.hpp"
#include "purex/oracle.hpp"
#include "purex/stopping.hpp"
#include "purex/tracking.hpp"

using namespace purex;

namespace {

const FamilySpec kGauss = FamilySpec::gaussian(1.0, {-1.0, 2.0});

void BM_SolveBestArm(benchmark::State& state) {
  const auto K = static_cast<std::size_t>(state.range(0));
  const auto p = ProblemInstance::best_arm(kGauss, K);
  std::vector<double> mu(K);
  for (std::size_t k = 0; k < K; ++k) mu[k] = 1.0 - static_cast<double>(k) / static_cast<double>(K);
  const BanditModel model(mu);
  for (auto _ : state) benchmark::DoNotOptimize(solve(p, model));
}
BENCHMARK(BM_SolveBestArm)->Arg(2)->Arg(5)->Arg(10)->Arg(20);

void BM_SolveBernoulliEps(benchmark::State& state) {
  const auto p = ProblemInstance::epsilon_best_arm(FamilySpec::bernoulli({0.01, 0.99}), 4, 0.05);
  const BanditModel model{0.7, 0.66, 0.5, 0.3};
  for (auto _ : state) benchmark::DoNotOptimize(solve(p, model));
}
BENCHMARK(BM_SolveBernoulliEps);

void BM_LinfProject(benchmark::State& state) {
  const auto K = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(K);
  double total = 0.0;
  for (double& v : w) total += (v = e(rng));
  for (double& v : w) v /= total;
  const double eps = 0.5 / static_cast<double>(K);
  for (auto _ : state) benchmark::DoNotOptimize(linf_project(w, eps));
}
BENCHMARK(BM_LinfProject)->Arg(3)->Arg(10)->Arg(100);

void BM_Glr(benchmark::State& state) {
  const auto p = ProblemInstance::epsilon_best_arm(kGauss, 5, 0.1);
  const BanditModel model{1.0, 0.95, 0.6, 0.3, 0.0};
  const std::vector<std::uint64_t> counts{400, 380, 60, 20, 10};
  for (auto _ : state) benchmark::DoNotOptimize(glr(p, counts, model));
}
BENCHMARK(BM_Glr);

void BM_RunTas(benchmark::State& state) {
  const auto p = ProblemInstance::best_arm(kGauss, 3);
  const BanditModel model{1.0, 0.5, 0.0};
  AlgoConfig cfg;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run(p, model, cfg, 0.01, seed++));
}
BENCHMARK(BM_RunTas)->Unit(benchmark::kMillisecond);

void BM_RunStas(benchmark::State& state) {
  const auto p = ProblemInstance::epsilon_best_arm(FamilySpec::gaussian(1.0, {0.0, 1.0}), 2, 0.1);
  const BanditModel model{0.5, 0.45};
  AlgoConfig cfg;
  cfg.algorithm = Algorithm::STaS;
  cfg.dk = 1.0;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run(p, model, cfg, 0.1, seed++));
}
BENCHMARK(BM_RunStas)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
