#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles/grid_game.hpp"
#include "purex/errors.hpp"
#include "purex/problems.hpp"

using namespace purex;

namespace {

const FamilySpec kGauss = FamilySpec::gaussian(1.0, {-1.0, 2.0});

ProblemInstance bai(std::size_t K) { return ProblemInstance::best_arm(kGauss, K); }
ProblemInstance eps_bai(std::size_t K, double eps) {
  return ProblemInstance::epsilon_best_arm(kGauss, K, eps);
}

}  // namespace

TEST(Problem, Construction) {
  EXPECT_THROW(ProblemInstance::best_arm(kGauss, 1), ValidationError);
  EXPECT_THROW(ProblemInstance::epsilon_best_arm(kGauss, 2, 0.0), ValidationError);
  EXPECT_THROW(ProblemInstance::epsilon_best_arm(FamilySpec::bernoulli({0.1, 0.9}), 2, 1.0),
               ValidationError);
  EXPECT_EQ(bai(3).alternative_offset(), 0.0);
  EXPECT_EQ(eps_bai(3, 0.2).alternative_offset(), 0.2);
}

TEST(IStar, Examples) {
  EXPECT_EQ(i_star(bai(3), BanditModel{1.0, 0.0, 0.5}), (AnswerSet{0}));
  EXPECT_EQ(i_star(eps_bai(2, 0.1), BanditModel{0.5, 0.45}), (AnswerSet{0, 1}));
  EXPECT_EQ(i_star(eps_bai(2, 0.01), BanditModel{0.5, 0.45}), (AnswerSet{0}));
  EXPECT_THROW(i_star(bai(2), BanditModel{0.3, 0.3}), DegenerateModelError);
  EXPECT_THROW(i_star(bai(3), BanditModel{0.3, 0.3}), ValidationError);
}

TEST(BestResponse, Examples) {
  const std::vector<double> w{0.5, 0.5};
  const BestResponse r = best_response(bai(2), w, BanditModel{1.0, 0.0}, 0);
  EXPECT_NEAR(r.value, 0.125, 1e-15);
  EXPECT_NEAR(r.witness[0], 0.5, 1e-15);
  EXPECT_NEAR(r.witness[1], 0.5, 1e-15);
  EXPECT_EQ(best_response(bai(2), w, BanditModel{1.0, 0.0}, 1).value, 0.0);
}

TEST(BestResponse, EpsilonMatchesGrid) {
  const std::vector<double> w{1.0, 1.0};
  const BestResponse r = best_response(eps_bai(2, 0.1), w, BanditModel{0.5, 0.45}, 0);
  // min_x d(0.5, x) + d(0.45, x + 0.1): gap 0.15 split evenly, 2·(0.075)²/2.
  EXPECT_NEAR(r.value, 0.15 * 0.15 / 4.0, 1e-15);
  auto gauss_kl = [](double p, double q) { return (p - q) * (p - q) / 2.0; };
  const double grid =
      testref::grid_best_response(gauss_kl, w, {0.5, 0.45}, 0, 0.1, 1e-5);
  EXPECT_NEAR(r.value, grid, 1e-6);
  EXPECT_NEAR(r.witness[1] - r.witness[0], 0.1, 1e-15);
}

TEST(BestResponse, RandomVsGrid) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> m(-1.0, 2.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto gauss_kl = [](double p, double q) { return (p - q) * (p - q) / 2.0; };
  for (int n = 0; n < 50; ++n) {
    std::vector<double> mu{m(rng), m(rng), m(rng)};
    std::vector<double> w{u(rng), u(rng), u(rng)};
    for (Answer i = 0; i < 3; ++i) {
      const double v = best_response(eps_bai(3, 0.2), w, BanditModel(mu), i).value;
      EXPECT_NEAR(v, testref::grid_best_response(gauss_kl, w, mu, i, 0.2, 1e-4), 1e-6);
    }
  }
}

TEST(BestResponse, DegenerateWeights) {
  const std::vector<double> w{0.0, 0.0};
  const BestResponse r = best_response(bai(2), w, BanditModel{1.0, 0.0}, 0);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.value, 0.0);
}

TEST(BestResponse, BernoulliEndpointExcluded) {
  const auto p = ProblemInstance::best_arm(FamilySpec::bernoulli({0.1, 0.9}), 2);
  const std::vector<double> w{3.0, 2.0};
  const BestResponse r = best_response(p, w, BanditModel{1.0, 0.0}, 0);
  EXPECT_TRUE(std::isfinite(r.value));
  EXPECT_GT(r.value, 0.0);
}

TEST(AlternativeClosure, Basic) {
  EXPECT_FALSE(in_alternative_closure(bai(2), BanditModel{1.0, 0.0}, 0));
  EXPECT_TRUE(in_alternative_closure(bai(2), BanditModel{1.0, 0.0}, 1));
  EXPECT_TRUE(in_alternative_closure(bai(2), BanditModel{0.5, 0.5}, 0));
  EXPECT_FALSE(in_alternative_closure(eps_bai(2, 0.1), BanditModel{0.45, 0.5}, 0));
}

TEST(AnswerFromStatistic, Examples) {
  EXPECT_EQ(answer_from_statistic(std::vector<double>{3.2, 0.1}), 0u);
  EXPECT_EQ(answer_from_statistic(std::vector<double>{2.0, 2.0}), 0u);
  EXPECT_EQ(answer_from_statistic(std::vector<double>{0.0, 0.0, 5.0}), 2u);
}
