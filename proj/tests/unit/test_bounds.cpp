#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles/h_terms_reference.hpp"
#include "purex/bounds.hpp"
#include "purex/stopping.hpp"

using namespace purex;

namespace {

GInputs inputs(std::size_t K, double dk, double D, double L, double sigma2) {
  GInputs in;
  in.num_arms = K;
  in.dk = dk;
  in.constants.D = D;
  in.constants.L = L;
  in.constants.F = 0.1;
  in.sigma2 = sigma2;
  return in;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

}  // namespace

TEST(Dk, FixedPointResidual) {
  for (std::size_t K : {2u, 3u, 4u}) {
    const double d = solve_dk(K);
    EXPECT_GE(d, 1.0);
    EXPECT_LE(dk_series_rhs(d, K), d * (1.0 + 1e-6)) << K;
  }
}

TEST(Dk, KnownScale) {
  const double d = solve_dk(2);
  EXPECT_GT(d, 1e6);
  EXPECT_LT(d, 1e7);
}

TEST(GTerms, MatchReference) {
  const auto h = g_terms(1e6, inputs(2, 1.0, 1.0, 0.5, 1.0));
  const auto r = testref::h_terms_reference(1e6L, 2, 1.0L, 1.0L, 0.5L, 1.0L);
  EXPECT_LT(rel(h.h1, static_cast<double>(r.h1)), 1e-9);
  EXPECT_LT(rel(h.h2, static_cast<double>(r.h2)), 1e-9);
  EXPECT_LT(rel(h.h3, static_cast<double>(r.h3)), 1e-9);
  EXPECT_LT(rel(h.h4, static_cast<double>(r.h4)), 1e-9);
  EXPECT_LT(rel(h.h5, static_cast<double>(r.h5)), 1e-9);

  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 100; ++n) {
    const std::size_t K = 2 + static_cast<std::size_t>(u(rng) * 4);
    const double k4 = 10.0 * std::pow(static_cast<double>(K), 4);
    const double t = k4 * std::pow(10.0, 6.0 * u(rng));
    const double dk = 1.0 + 1e6 * u(rng);
    const double D = 3.0 * u(rng), L = 3.0 * u(rng), s2 = 0.1 + 2.0 * u(rng);
    const auto a = g_terms(t, inputs(K, dk, D, L, s2));
    const auto b = testref::h_terms_reference(t, K, dk, D, L, s2);
    const double total_ref = static_cast<double>(b.h1 + b.h2 + b.h3 + b.h4);
    EXPECT_LT(rel(g_tas(t, inputs(K, dk, D, L, s2)), total_ref), 1e-9);
    EXPECT_LT(rel(a.h5, static_cast<double>(b.h5)), 1e-9);
  }
}

TEST(GTerms, Sublinear) {
  const GInputs in = inputs(2, 1.0, 1.0, 0.5, 1.0);
  EXPECT_LT(g_tas(1e8, in) / 1e8, g_tas(1e6, in) / 1e6);
  EXPECT_LT(g_stas(1e8, in) / 1e8, g_stas(1e6, in) / 1e6);
}

TEST(GTerms, FlatFamily) {
  const GInputs in = inputs(3, 5.0, 0.0, 0.7, 1.0);
  const auto h = g_terms(1e5, in);
  EXPECT_EQ(h.h1, 0.0);
  EXPECT_EQ(h.h3, 0.0);
  EXPECT_EQ(h.h4, 0.0);
  EXPECT_GT(h.h2, 0.0);
  EXPECT_EQ(g_tas(1e5, in), h.h2);
  EXPECT_EQ(g_stas(1e5, in), g_tas(1e5, in));
}

TEST(GTerms, StickyDifference) {
  const GInputs in = inputs(2, 4.0, 1.5, 0.5, 2.0);
  for (double t : {160.0, 1e4, 1e9}) {
    const double f = 4.0 * std::log(t);
    const double expect = 2.0 * 1.5 * std::sqrt(2.0 * 2.0 * f) *
                          std::sqrt(8.0 * std::pow(t, 1.5) + 16.0 * t * std::log(t));
    EXPECT_LT(rel(g_stas(t, in) - g_tas(t, in), expect), 1e-9);
    EXPECT_GE(g_stas(t, in), g_tas(t, in));
  }
}

TEST(GTerms, Precondition) {
  EXPECT_THROW(g_tas(159.0, inputs(2, 1.0, 1.0, 1.0, 1.0)), ValidationError);
  EXPECT_NO_THROW(g_tas(160.0, inputs(2, 1.0, 1.0, 1.0, 1.0)));
}

TEST(T0, ZeroGMatchesScan) {
  T0Query q;
  q.delta = 0.01;
  q.num_arms = 2;
  q.t_star_inv = 0.125;
  q.zero_g = true;
  const BigReal t0 = compute_t0(q);
  std::uint64_t scan = 160;
  while (!(beta(scan, 0.01, 2) <= (scan - std::sqrt(double(scan)) - 1.0) * 0.125)) ++scan;
  EXPECT_EQ(t0, BigReal(scan));
  EXPECT_TRUE(t0_predicate(t0, q));
  if (t0 > 160) {
    EXPECT_FALSE(t0_predicate(t0 - 1, q));
  }
}

TEST(T0, TwoPointAndMonotone) {
  T0Query q;
  q.num_arms = 2;
  q.t_star_inv = 0.125;
  q.g = inputs(2, solve_dk(2), 1.5, 9.0 / 4.0, 1.0);
  BigReal prev = 0;
  for (double delta : {0.1, 0.01, 1e-4, 1e-8}) {
    q.delta = delta;
    const BigReal t0 = compute_t0(q);
    EXPECT_TRUE(t0_predicate(t0, q));
    EXPECT_FALSE(t0_predicate(t0 - 1, q));
    EXPECT_GE(t0, prev);
    prev = t0;
  }
  q.delta = 0.1;
  const BigReal tas = compute_t0(q);
  q.variant = Algorithm::STaS;
  const BigReal stas_free = compute_t0(q);
  q.t_mu = 1e6;
  const BigReal stas = compute_t0(q);
  EXPECT_GE(stas_free, tas);
  EXPECT_GE(stas, stas_free);
  q.t_star_inv = 0.0;
  EXPECT_THROW(compute_t0(q), ValidationError);
}

TEST(TM, Examples) {
  EXPECT_EQ(compute_tm(2, 1.0, 1.0, 1e9), BigReal(160));
  EXPECT_THROW(compute_tm(2, 1.0, 1.0, 0.0), ValidationError);
  BigReal prev = 0;
  for (double F : {1.0, 0.5, 0.1, 0.01}) {
    const BigReal n = compute_tm(2, 1.0, 2e6, F);
    EXPECT_TRUE(drift_predicate(n, 2, 1.0, 2e6, 4.0, F));
    if (n > 160) {
      EXPECT_FALSE(drift_predicate(n - 1, 2, 1.0, 2e6, 4.0, F));
    }
    EXPECT_GE(n, prev);
    prev = n;
  }
}

TEST(TMu, Examples) {
  EXPECT_EQ(compute_tmu(3, 1.0, 1.0, 1e9), BigReal(810));
  EXPECT_THROW(compute_tmu(2, 1.0, 1.0, -1.0), ValidationError);
  BigReal prev = 0;
  for (double eps : {0.2, 0.1, 0.05, 0.025}) {
    const BigReal n = compute_tmu(2, 1.0, 2e6, eps);
    EXPECT_TRUE(drift_predicate(n, 2, 1.0, 2e6, 8.0, eps));
    EXPECT_FALSE(drift_predicate(n - 1, 2, 1.0, 2e6, 8.0, eps));
    EXPECT_GE(n, prev);
    prev = n;
  }
}

TEST(EpsMu, Probe) {
  const FamilySpec g = FamilySpec::gaussian(1.0, {-1.0, 2.0});
  const auto bai = ProblemInstance::best_arm(g, 2);
  EXPECT_DOUBLE_EQ(probe_eps_mu(bai, BanditModel{1.0, 0.0}, {}, default_eps_mu_grid()).eps_mu, 0.5);
  EXPECT_DOUBLE_EQ(probe_eps_mu(bai, BanditModel{1.0, 0.0}, {}, {0.1}).eps_mu, 0.1);

  const auto eps = ProblemInstance::epsilon_best_arm(FamilySpec::gaussian(1.0, {0.0, 1.0}), 2, 0.1);
  const EpsMuProbe p = probe_eps_mu(eps, BanditModel{0.5, 0.45}, {}, default_eps_mu_grid());
  EXPECT_FALSE(p.certified);
  EXPECT_GT(p.eps_mu, 0.0);
  EXPECT_LT(p.eps_mu, 0.5);
  EXPECT_THROW(probe_eps_mu(eps, BanditModel{0.5, 0.45}, {}, {10.0 * p.eps_mu}), ValidationError);
}

TEST(TheoremBound, Assembly) {
  const FamilySpec g = FamilySpec::gaussian(1.0, {-1.0, 2.0});
  BoundInputs in{ProblemInstance::best_arm(g, 2), BanditModel{1.0, 0.0}, std::nullopt,
                 std::nullopt, {}};
  const BoundReport r = theorem_bound(in, 0.1, Algorithm::TaS, false);
  EXPECT_NEAR(r.t_star_inv, 0.125, 1e-12);
  EXPECT_DOUBLE_EQ(r.lower_bound, char_time_lower_bound(0.125, 0.1));
  const double extra = 160.0 + std::numbers::pi * std::numbers::pi / 24.0;
  EXPECT_NEAR(static_cast<double>(r.upper_bound - r.t0), extra, 1e-9);
  const BoundReport raw = theorem_bound(in, 0.1, Algorithm::TaS, true);
  EXPECT_NEAR(static_cast<double>(raw.upper_bound - raw.t0 - raw.t_m), extra, 1e-9);
  EXPECT_GE(r.upper_bound, BigReal(r.lower_bound));
  const std::string js = to_json(r);
  EXPECT_NE(js.find("\"T0\""), std::string::npos);
  EXPECT_EQ(to_integer_string(BigReal(12345)), "12345");
}
