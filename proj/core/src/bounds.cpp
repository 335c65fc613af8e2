#include "purex/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>
#include "numeric.hpp"
#include "purex/stopping.hpp"

namespace purex {

namespace {

constexpr double kSeriesCutoff = 1e6;
constexpr int kDkMaxIterations = 1000;
constexpr double kDkRelTol = 1e-6;
const BigReal kRoundCap("1e80");

// log of the summand (log²(D t²) log t)^K / t² at t = e^u.
double log_summand(double log_dk, std::size_t K, double u) {
  const double a = log_dk + 2.0 * u;
  return static_cast<double>(K) * std::log(a * a * u) - 2.0 * u;
}

// Upper bound on Σ_{t > T} of the summand. In u = log t the summand is
// unimodal (its log-derivative is K(4/log(Dt²) + 1/log t) − 2 over t, which
// decreases), so the sum is at most the integral plus the peak value.
double series_tail(double dk, std::size_t K, double cutoff) {
  const double log_dk = std::log(dk);
  const double u0 = std::log(cutoff);
  // Peak of the summand over t ≥ cutoff.
  auto neg = [&](double u) { return -log_summand(log_dk, K, u); };
  const auto [u_peak, neg_peak] = detail::golden_section_minimize(neg, u0, u0 + 5000.0, 1e-9);
  double peak = std::exp(-neg_peak);
  peak = std::max(peak, std::exp(log_summand(log_dk, K, u0)));
  (void)u_peak;

  // ∫_{u0}^{∞} exp(log_summand(u) + u) du by composite Simpson, then bound the
  // remainder once the integrand decays at least like e^{-u/2}.
  auto integrand = [&](double u) { return std::exp(log_summand(log_dk, K, u) + u); };
  const double h = 0.01;
  double integral = 0.0;
  double u = u0;
  for (int block = 0; block < 2000000; ++block) {
    const double f0 = integrand(u);
    const double f1 = integrand(u + 0.5 * h);
    const double f2 = integrand(u + h);
    integral += h / 6.0 * (f0 + 4.0 * f1 + f2);
    u += h;
    // d/du log integrand = K(4/(log D + 2u) + 1/u) − 1.
    const double slope =
        static_cast<double>(K) * (4.0 / (log_dk + 2.0 * u) + 1.0 / u) - 1.0;
    if (slope <= -0.5 && f2 <= 1e-18 * std::max(integral, 1e-300)) {
      integral += 2.0 * f2;
      break;
    }
  }
  return integral + peak;
}

template <class Pred>
BigReal first_true_from(const BigReal& start, Pred&& pred) {
  if (pred(start)) return start;
  BigReal lo = start;
  BigReal hi = start * 2;
  while (!pred(hi)) {
    lo = hi;
    hi *= 2;
    if (hi > kRoundCap) throw CapExceededError("round search exceeded the 1e80 cap");
  }
  while (hi - lo > 1) {
    BigReal mid = floor((lo + hi) / 2);
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

BigReal ten_k4(std::size_t K) {
  const double k = static_cast<double>(K);
  return BigReal(10.0 * k * k * k * k);
}

}  // namespace

double dk_series_rhs(double dk, std::size_t num_arms) {
  if (!(dk > 0.0)) throw ValidationError("dk_series_rhs: D must be positive");
  if (num_arms < 1) throw ValidationError("dk_series_rhs: K must be at least 1");
  const double log_dk = std::log(dk);
  const auto cutoff = static_cast<std::uint64_t>(kSeriesCutoff);
  double sum = 0.0;
  // t = 1 contributes 0 (log 1 = 0).
  for (std::uint64_t t = 2; t <= cutoff; ++t) {
    sum += std::exp(log_summand(log_dk, num_arms, std::log(static_cast<double>(t))));
  }
  sum += series_tail(dk, num_arms, kSeriesCutoff);
  const double k = static_cast<double>(num_arms);
  return std::numbers::e * std::pow(std::numbers::e / k, k) * sum;
}

double solve_dk(std::size_t num_arms) {
  double d = 1.0;
  for (int it = 0; it < kDkMaxIterations; ++it) {
    const double next = std::max(1.0, dk_series_rhs(d, num_arms));
    if (std::abs(next - d) <= kDkRelTol * d) {
      // The iterates increase toward the fixed point from below; step just past it.
      return next * (1.0 + kDkRelTol);
    }
    d = next;
  }
  throw ConvergenceError("solve_dk: no fixed point within 1000 iterations", {d}, d, kInfinity);
}

bool t0_predicate(const BigReal& t, const T0Query& q) {
  const BigReal b = beta_threshold(t, q.delta, q.num_arms);
  BigReal g = 0;
  if (!q.zero_g) {
    g = q.variant == Algorithm::TaS ? g_tas(t, q.g) : g_stas(t, q.g);
  }
  BigReal head = t - sqrt(t) - 1;
  if (q.variant == Algorithm::STaS) head -= q.t_mu;
  return b <= head * BigReal(q.t_star_inv) - g;
}

BigReal compute_t0(const T0Query& q) {
  if (!(q.t_star_inv > 0.0)) throw ValidationError("compute_t0: t_star_inv must be positive");
  if (!(q.delta > 0.0 && q.delta < 1.0)) throw ValidationError("compute_t0: delta must be in (0,1)");
  auto pred = [&](const BigReal& t) { return t0_predicate(t, q); };
  BigReal start = ten_k4(q.num_arms);
  for (int attempt = 0; attempt < 16; ++attempt) {
    const BigReal t0 = first_true_from(start, pred);
    const BigReal probes[] = {t0 + 1,     t0 + 2,     t0 + 10,    t0 + 100,  t0 * BigReal("1.001"),
                              t0 * BigReal("1.01"), t0 * BigReal("1.1"), t0 * BigReal("1.5"),
                              t0 * 2,     t0 * 10};
    bool monotone = true;
    for (const BigReal& p : probes) {
      const BigReal pt = floor(p);
      if (!pred(pt)) {
        start = pt;
        monotone = false;
        break;
      }
    }
    if (monotone) return t0;
  }
  throw CapExceededError("compute_t0: predicate keeps failing above the candidate");
}

bool drift_predicate(const BigReal& n, std::size_t num_arms, double sigma2, double dk,
                     double constant, double threshold) {
  const BigReal k = BigReal(static_cast<double>(num_arms));
  const BigReal den = sqrt(sqrt(n) + k * k) - 2 * k;
  if (den <= 0) return false;
  const BigReal lhs = sqrt(BigReal(constant * sigma2 * dk) * log(n) / den);
  return lhs <= BigReal(threshold);
}

BigReal compute_tm(std::size_t num_arms, double sigma2, double dk, double F) {
  if (!(F > 0.0)) throw ValidationError("compute_tm: F must be positive (model on the box boundary)");
  return first_true_from(ten_k4(num_arms), [&](const BigReal& n) {
    return drift_predicate(n, num_arms, sigma2, dk, 4.0, F);
  });
}

BigReal compute_tmu(std::size_t num_arms, double sigma2, double dk, double eps_mu) {
  if (!(eps_mu > 0.0)) throw ValidationError("compute_tmu: eps_mu must be positive");
  return first_true_from(ten_k4(num_arms), [&](const BigReal& n) {
    return drift_predicate(n, num_arms, sigma2, dk, 8.0, eps_mu);
  });
}

std::vector<double> default_eps_mu_grid() {
  return {0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001, 1e-4, 1e-5, 1e-6};
}

EpsMuProbe probe_eps_mu(const ProblemInstance& problem, const BanditModel& model,
                        const OracleOptions& oracle, const std::vector<double>& grid) {
  const std::size_t K = problem.num_arms();
  const AnswerSet correct = i_star(problem, model);
  const OracleSolution base = solve(problem, model, oracle);
  std::vector<bool> allowed(K, true);
  for (Answer i : correct) allowed[i] = false;
  for (Answer i : base.i_f) allowed[i] = true;

  std::vector<double> sorted = grid;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const Interval theta = problem.family().theta();

  for (double eta : sorted) {
    if (!(eta > 0.0)) continue;
    std::vector<std::vector<double>> samples;
    const std::size_t corners = K <= 10 ? (std::size_t{1} << K) : 1024;
    for (std::size_t mask = 0; mask < corners; ++mask) {
      std::vector<double> m = model.vec();
      for (std::size_t k = 0; k < K; ++k) m[k] += ((mask >> k) & 1U) ? eta : -eta;
      samples.push_back(std::move(m));
    }
    for (std::size_t k = 0; k < K; ++k) {
      for (double sign : {-1.0, 1.0}) {
        std::vector<double> m = model.vec();
        m[k] += sign * eta;
        samples.push_back(std::move(m));
      }
    }
    std::mt19937_64 rng(0x5eed0001ULL);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int s = 0; s < 64; ++s) {
      std::vector<double> m = model.vec();
      for (double& v : m) v += eta * unit(rng);
      samples.push_back(std::move(m));
    }

    bool pass = true;
    for (const auto& m : samples) {
      bool inside = true;
      for (double v : m) inside = inside && theta.contains_open(v);
      if (!inside) continue;
      const OracleSolution sol = solve(problem, BanditModel(m), oracle);
      for (Answer i : sol.i_f) {
        if (!allowed[i]) {
          pass = false;
          break;
        }
      }
      if (!pass) break;
    }
    if (pass) return EpsMuProbe{eta, false};
  }
  throw ValidationError("probe_eps_mu: no grid value passes; supply a finer grid");
}

BoundReport theorem_bound(const BoundInputs& inputs, double delta, Algorithm variant,
                          bool raw_mode) {
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("theorem_bound: delta must be in (0,1)");
  const ProblemInstance& problem = inputs.problem;
  const std::size_t K = problem.num_arms();
  BoundReport r;
  r.num_arms = K;
  r.delta = delta;
  r.variant = variant;
  r.raw_mode = raw_mode;
  r.dk_overridden = inputs.dk_override.has_value();
  r.dk = r.dk_overridden ? *inputs.dk_override : solve_dk(K);
  if (!(r.dk >= 1.0)) throw ValidationError("theorem_bound: D_K must be at least 1");
  r.constants = family_constants(problem.family(), inputs.model.means());
  r.sigma2 = problem.family().sigma2();
  r.t_star_inv = solve(problem, inputs.model, inputs.oracle).t_star_inv;
  r.ten_k4 = ten_k4(K).convert_to<double>();
  r.pi2_over_24 = std::numbers::pi * std::numbers::pi / 24.0;
  r.lower_bound = char_time_lower_bound(r.t_star_inv, delta);

  if (r.constants.F > 0.0) {
    r.t_m = compute_tm(K, r.sigma2, r.dk, r.constants.F);
  } else if (raw_mode) {
    throw ValidationError("theorem_bound: raw mode needs means strictly inside the box");
  }

  T0Query q;
  q.delta = delta;
  q.num_arms = K;
  q.t_star_inv = r.t_star_inv;
  q.variant = variant;
  q.g = GInputs{K, r.dk, r.constants, r.sigma2};
  if (variant == Algorithm::STaS) {
    if (inputs.eps_mu) {
      r.eps_mu = *inputs.eps_mu;
    } else {
      r.eps_mu = probe_eps_mu(problem, inputs.model, inputs.oracle, default_eps_mu_grid()).eps_mu;
      r.eps_mu_probed = true;
    }
    r.t_mu = compute_tmu(K, r.sigma2, r.dk, r.eps_mu);
    q.t_mu = r.t_mu;
  }
  r.t0 = compute_t0(q);
  r.upper_bound = BigReal(r.ten_k4) + BigReal(r.pi2_over_24) + r.t0;
  if (raw_mode) r.upper_bound += r.t_m;
  return r;
}

std::string to_integer_string(const BigReal& value) {
  std::string s = floor(value).str(0, std::ios_base::fixed);
  const auto dot = s.find('.');
  if (dot != std::string::npos) s.erase(dot);
  return s;
}

std::string to_json(const BoundReport& r) {
  using nlohmann::ordered_json;
  auto rounds = [](const BigReal& v) {
    ordered_json j;
    j["exact"] = to_integer_string(v);
    j["approx"] = v.convert_to<double>();
    return j;
  };
  ordered_json j;
  j["K"] = r.num_arms;
  j["delta"] = r.delta;
  j["variant"] = std::string(to_string(r.variant));
  j["raw_mode"] = r.raw_mode;
  j["D_K"] = r.dk;
  j["D_K_overridden"] = r.dk_overridden;
  j["L"] = r.constants.L;
  j["D"] = r.constants.D;
  j["F"] = r.constants.F;
  j["sigma2"] = r.sigma2;
  j["t_star_inv"] = r.t_star_inv;
  j["T_M"] = rounds(r.t_m);
  if (r.variant == Algorithm::STaS) {
    j["eps_mu"] = r.eps_mu;
    j["eps_mu_source"] = r.eps_mu_probed ? "empirical probe (not certified)" : "user";
    j["T_mu"] = rounds(r.t_mu);
  }
  j["T0"] = rounds(r.t0);
  j["ten_K4"] = r.ten_k4;
  j["pi2_over_24"] = r.pi2_over_24;
  j["upper_bound"] = rounds(r.upper_bound);
  {
    std::string exact = r.upper_bound.str(0, std::ios_base::fixed);
    const auto dot = exact.find('.');
    if (dot != std::string::npos && exact.size() > dot + 7) exact.erase(dot + 7);
    j["upper_bound"]["exact"] = exact;
  }
  j["lower_bound"] = r.lower_bound;
  return j.dump(2);
}

}  // namespace purex
