#include "purex/selftest.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "purex/algorithms.hpp"
#include "purex/exp_family.hpp"
#include "purex/oracle.hpp"
#include "purex/stopping.hpp"
#include "purex/tracking.hpp"

namespace purex {

namespace {

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

bool check_closed_form() {
  const auto p = ProblemInstance::best_arm(FamilySpec::gaussian(1.0, {-1.0, 2.0}), 2);
  const OracleSolution s = solve(p, BanditModel{1.0, 0.0});
  const auto& w = s.weights.at(0);
  return close(s.t_star_inv, 0.125, 1e-9) && close(w[0], 0.5, 1e-6) && close(w[1], 0.5, 1e-6);
}

bool check_beta() { return close(beta(10, 0.1, 2), 26.9677, 1e-3); }

bool check_projection() {
  const auto a = linf_project(std::vector<double>{1.0, 0.0}, 0.1);
  const auto b = linf_project(std::vector<double>{1.0, 0.0, 0.0}, 0.1);
  return close(a[0], 0.9, 1e-12) && close(a[1], 0.1, 1e-12) && close(b[0], 0.8, 1e-12) &&
         close(b[1], 0.1, 1e-12) && close(b[2], 0.1, 1e-12);
}

bool check_kl_identity() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> g(-3.0, 3.0);
  std::uniform_real_distribution<double> b(0.02, 0.98);
  const FamilySpec gauss = FamilySpec::gaussian(0.7, {-3.0, 3.0});
  const FamilySpec bern = FamilySpec::bernoulli({0.01, 0.99});
  for (int n = 0; n < 1000; ++n) {
    for (const FamilySpec* f : {&gauss, &bern}) {
      auto& dist = f->is_gaussian() ? g : b;
      const double x = dist(rng), y = dist(rng), z = dist(rng);
      const double lhs = kl(*f, x, y);
      const double rhs =
          kl(*f, x, z) + kl(*f, z, y) + (natural_param(*f, y) - natural_param(*f, z)) * (z - x);
      if (!close(lhs, rhs, 1e-10)) return false;
    }
  }
  return true;
}

bool check_forced_exploration() {
  const std::size_t K = 3;
  TrackerState st(K);
  for (std::size_t k = 0; k < K; ++k) st.record_pull(k);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::uint64_t t = K; t < 10000; ++t) {
    std::vector<double> w(K);
    double s = 0.0;
    for (double& v : w) s += (v = u(rng));
    for (double& v : w) v /= s;
    st.record_pull(st.next_action(w, epsilon_t(K, st.t())));
    const double floor = std::sqrt(static_cast<double>(st.t() + K * K)) - 2.0 * K;
    for (std::uint64_t c : st.counts()) {
      if (static_cast<double>(c) < floor) return false;
    }
  }
  return true;
}

bool check_glr() {
  const auto p = ProblemInstance::best_arm(FamilySpec::gaussian(1.0, {-1.0, 2.0}), 2);
  const std::vector<std::uint64_t> counts{10, 10};
  const GlrResult g = glr(p, counts, BanditModel{1.0, 0.0});
  return close(g.statistic, 2.5, 1e-12) && g.argmax_answer == 0 && close(g.per_answer[1], 0.0, 0.0);
}

bool check_determinism() {
  const auto p = ProblemInstance::best_arm(FamilySpec::gaussian(1.0, {-1.0, 3.0}), 2);
  AlgoConfig cfg;
  const RunRecord a = run(p, BanditModel{2.0, 0.0}, cfg, 0.5, 42);
  const RunRecord b = run(p, BanditModel{2.0, 0.0}, cfg, 0.5, 42);
  return a == b && a.stopped && a.stopping_time < 10000;
}

}  // namespace

int run_selftest(std::ostream& out) {
  const std::vector<std::pair<std::string, std::function<bool()>>> checks{
      {"oracle two-arm closed form", check_closed_form},
      {"stopping threshold value", check_beta},
      {"linf projection examples", check_projection},
      {"kl three-point identity", check_kl_identity},
      {"forced exploration floor", check_forced_exploration},
      {"glr weighted-mean value", check_glr},
      {"seeded run determinism", check_determinism},
  };
  int failures = 0;
  for (const auto& [name, fn] : checks) {
    bool ok = false;
    std::string detail;
    try {
      ok = fn();
    } catch (const std::exception& e) {
      detail = e.what();
    }
    out << (ok ? "ok   " : "FAIL ") << name;
    if (!detail.empty()) out << ": " << detail;
    out << '\n';
    if (!ok) ++failures;
  }
  return failures;
}

}  // namespace purex
