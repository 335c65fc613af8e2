#include "purex/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "numeric.hpp"
#include "purex/errors.hpp"

namespace purex {

namespace {

std::vector<double> uniform_weights(std::size_t K) {
  return std::vector<double>(K, 1.0 / static_cast<double>(K));
}

// Best response of one competitor a against answer i at fixed weights, with the
// supergradient (∂/∂ω_i, ∂/∂ω_a) of G_a at those weights.
struct CompetitorTerm {
  Answer arm = 0;
  double value = 0.0;
  double grad_answer = 0.0;
  double grad_arm = 0.0;
};

std::vector<CompetitorTerm> competitor_terms(const ProblemInstance& problem,
                                             const BanditModel& model, Answer answer,
                                             const std::vector<double>& weights) {
  const FamilySpec& family = problem.family();
  const double off = problem.alternative_offset();
  const double mu_i = model[answer];
  std::vector<CompetitorTerm> terms;
  terms.reserve(problem.num_arms() - 1);
  for (Answer a = 0; a < problem.num_arms(); ++a) {
    if (a == answer) continue;
    CompetitorTerm t;
    t.arm = a;
    if (mu_i <= model[a] - off) {
      terms.push_back(t);  // λ = μ is already an alternative: zero value, zero slope
      continue;
    }
    double x;
    if (weights[answer] + weights[a] == 0.0) {
      x = mu_i;
      t.value = 0.0;
    } else {
      const WeightedKlMin m =
          weighted_kl_min(family, weights[answer], mu_i, weights[a], model[a], off);
      x = m.minimizer;
      t.value = m.value;
    }
    t.grad_answer = kl(family, mu_i, x);
    t.grad_arm = kl(family, model[a], x + off);
    terms.push_back(t);
  }
  return terms;
}

// min over dual mixtures q of max_j Σ_a q_a ∇G_a(ω)_j. Any q gives a valid
// upper bound on D_i(μ) because each G_a is concave and 1-homogeneous.
double dual_upper_bound(std::vector<CompetitorTerm> terms) {
  double best = kInfinity;
  for (const CompetitorTerm& t : terms) {
    best = std::min(best, std::max(t.grad_answer, t.grad_arm));
  }
  // Mixtures q_a ∝ 1/∂_a G_a over the m lowest-valued competitors equalize the
  // competitor coordinates; this is the KKT form at the optimum.
  std::sort(terms.begin(), terms.end(),
            [](const CompetitorTerm& l, const CompetitorTerm& r) { return l.value < r.value; });
  double inv_sum = 0.0;
  double ratio_sum = 0.0;
  for (const CompetitorTerm& t : terms) {
    if (!(t.grad_arm > 0.0) || !std::isfinite(t.grad_arm) || !std::isfinite(t.grad_answer)) {
      break;
    }
    inv_sum += 1.0 / t.grad_arm;
    ratio_sum += t.grad_answer / t.grad_arm;
    const double c = 1.0 / inv_sum;
    best = std::min(best, std::max(c, c * ratio_sum));
  }
  return best;
}

double min_value(const std::vector<CompetitorTerm>& terms) {
  double v = kInfinity;
  for (const CompetitorTerm& t : terms) v = std::min(v, t.value);
  return v;
}

// Exact solver. For ratio r_a = ω_a/ω_i the competitor value is
// ω_i·h_a(r_a); every competitor is equalized at h_a = y and y is fixed by
// Σ_a d(μ_i, x_a)/d(μ_a, x_a + off) = 1.
class Equalizer {
 public:
  Equalizer(const ProblemInstance& problem, const BanditModel& model, Answer answer)
      : family_(problem.family()),
        off_(problem.alternative_offset()),
        mu_i_(model[answer]),
        answer_(answer),
        K_(problem.num_arms()) {
    for (Answer a = 0; a < K_; ++a) {
      if (a == answer) continue;
      Competitor c;
      c.arm = a;
      c.mu = model[a];
      c.lo = c.mu - off_;
      c.hi = mu_i_;
      c.unbounded = false;
      if (family_.is_bernoulli()) {
        if (c.lo < 0.0) {
          c.lo = 0.0;
          c.unbounded = true;
        }
        c.hi = std::min(c.hi, 1.0 - off_);
      }
      c.cap = c.unbounded ? kInfinity : kl(family_, mu_i_, c.mu - off_);
      competitors_.push_back(c);
    }
  }

  std::vector<double> solve() const {
    double y_max = kInfinity;
    for (const Competitor& c : competitors_) y_max = std::min(y_max, c.cap);

    double lo = 0.0;
    double hi;
    if (std::isfinite(y_max)) {
      hi = y_max;
    } else {
      hi = 1.0;
      for (int k = 0; k < 2000 && phi(hi) < 1.0; ++k) {
        lo = hi;
        hi *= 2.0;
      }
    }
    for (int it = 0; it < 400; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (phi(mid) < 1.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    // lo keeps phi below 1, so y stays under every cap even when the bracket
    // has collapsed onto a cap a few ulps above zero.
    const double y = lo;

    std::vector<double> w(K_, 0.0);
    w[answer_] = 1.0;
    for (const Competitor& c : competitors_) {
      if (family_.is_gaussian()) {
        w[c.arm] = y / (gaussian_c(c) - y);
      } else {
        w[c.arm] = ratio(c, x_of(c, y));
      }
    }
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (!std::isfinite(total)) {
      for (double& v : w) v = std::isfinite(v) ? 0.0 : 1.0;
      total = std::accumulate(w.begin(), w.end(), 0.0);
    }
    for (double& v : w) v /= total;
    return w;
  }

 private:
  struct Competitor {
    Answer arm;
    double mu;
    double lo;
    double hi;
    bool unbounded;
    double cap;  // sup of h over the admissible range
  };

  double gaussian_c(const Competitor& c) const {
    const double gap = mu_i_ - c.mu + off_;
    return gap * gap / (2.0 * family_.sigma2());
  }

  // ω_a/ω_i at which the competitor's inner minimizer sits at x.
  double ratio(const Competitor& c, double x) const {
    const double num = (mu_i_ - x) * natural_param_derivative(family_, x);
    const double den = (x + off_ - c.mu) * natural_param_derivative(family_, x + off_);
    if (den <= 0.0) return kInfinity;
    return std::max(num, 0.0) / den;
  }

  double h(const Competitor& c, double x) const {
    const double r = ratio(c, x);
    double value = kl(family_, mu_i_, x);
    if (r > 0.0) value += r * kl(family_, c.mu, x + off_);
    return value;
  }

  double x_of(const Competitor& c, double y) const {
    if (family_.is_gaussian()) {
      const double cc = gaussian_c(c);
      const double r = y / (cc - y);
      return (mu_i_ + r * (c.mu - off_)) / (1.0 + r);
    }
    return detail::bisect_sign_change([&](double x) { return h(c, x) - y; }, c.lo, c.hi,
                                      1e-15 * std::max(1.0, std::abs(c.hi)));
  }

  double phi(double y) const {
    double total = 0.0;
    for (const Competitor& c : competitors_) {
      if (family_.is_gaussian()) {
        const double r = y / (gaussian_c(c) - y);
        total += r * r;
        continue;
      }
      const double x = x_of(c, y);
      const double den = kl(family_, c.mu, x + off_);
      const double num = kl(family_, mu_i_, x);
      total += den > 0.0 ? num / den : kInfinity;
    }
    return total;
  }

  const FamilySpec& family_;
  double off_;
  double mu_i_;
  Answer answer_;
  std::size_t K_;
  std::vector<Competitor> competitors_;
};

DValue frank_wolfe(const ProblemInstance& problem, const BanditModel& model, Answer answer,
                   const OracleOptions& options) {
  const std::size_t K = problem.num_arms();
  const double log_comp = std::log(std::max<double>(2.0, static_cast<double>(K - 1)));
  const double tau_min = options.tol / (4.0 * log_comp);

  std::vector<double> w = uniform_weights(K);
  std::vector<double> best_w = w;
  double best_value = -kInfinity;
  double best_gap = kInfinity;

  auto smoothed = [&](const std::vector<CompetitorTerm>& terms, double tau) {
    const double m = min_value(terms);
    double s = 0.0;
    for (const CompetitorTerm& t : terms) s += std::exp(-(t.value - m) / tau);
    return m - tau * std::log(s);
  };

  double tau = -1.0;
  std::size_t it = 0;
  for (; it < options.max_iterations; ++it) {
    const auto terms = competitor_terms(problem, model, answer, w);
    const double value = min_value(terms);
    const double upper = dual_upper_bound(terms);
    const double gap = std::max(0.0, upper - value);
    if (value > best_value || (value == best_value && gap < best_gap)) {
      best_value = value;
      best_gap = gap;
      best_w = w;
    }
    if (gap <= options.tol) {
      DValue out;
      out.value = value;
      out.weights = w;
      out.gap = gap;
      out.iterations = it;
      return out;
    }
    if (tau < 0.0) tau = std::max(tau_min, 0.1 * std::max(value, options.tol));

    // Gradient of the softmin-smoothed objective.
    std::vector<double> grad(K, 0.0);
    double norm = 0.0;
    for (const CompetitorTerm& t : terms) norm += std::exp(-(t.value - value) / tau);
    for (const CompetitorTerm& t : terms) {
      const double q = std::exp(-(t.value - value) / tau) / norm;
      grad[answer] += q * t.grad_answer;
      grad[t.arm] += q * t.grad_arm;
    }
    const std::size_t vertex =
        static_cast<std::size_t>(std::max_element(grad.begin(), grad.end()) - grad.begin());
    const double fw_gap = grad[vertex] - std::inner_product(grad.begin(), grad.end(), w.begin(), 0.0);
    if (fw_gap <= 0.5 * tau && tau > tau_min) {
      tau = std::max(tau_min, 0.5 * tau);
      continue;
    }

    auto along = [&](double gamma) {
      std::vector<double> v(K);
      for (std::size_t k = 0; k < K; ++k) v[k] = (1.0 - gamma) * w[k];
      v[vertex] += gamma;
      return v;
    };
    const auto [gamma, neg] = detail::golden_section_minimize(
        [&](double g) {
          return -smoothed(competitor_terms(problem, model, answer, along(g)), tau);
        },
        0.0, 1.0, 1e-12);
    (void)neg;
    if (gamma <= 0.0) {
      if (tau <= tau_min) break;
      tau = std::max(tau_min, 0.5 * tau);
      continue;
    }
    w = along(gamma);
  }
  throw ConvergenceError("d_value: Frank-Wolfe did not certify the duality gap", best_w,
                         best_value, best_gap);
}

}  // namespace

GapCertificate certify_weights(const ProblemInstance& problem, const BanditModel& model,
                               Answer answer, const std::vector<double>& weights) {
  const auto terms = competitor_terms(problem, model, answer, weights);
  GapCertificate c;
  c.value = min_value(terms);
  c.upper = dual_upper_bound(terms);
  return c;
}

DValue d_value(const ProblemInstance& problem, const BanditModel& model, Answer answer,
               const OracleOptions& options) {
  problem.check_model(model);
  if (answer >= problem.num_answers()) throw ValidationError("d_value: answer out of range");
  if (!(options.tol > 0.0)) throw ValidationError("d_value: tol must be positive");

  const std::size_t K = problem.num_arms();
  if (in_alternative_closure(problem, model, answer)) {
    DValue out;
    out.weights = uniform_weights(K);
    out.in_closure = true;
    return out;
  }
  if (options.method == OracleMethod::FrankWolfe) {
    return frank_wolfe(problem, model, answer, options);
  }

  DValue out;
  out.weights = Equalizer(problem, model, answer).solve();
  const GapCertificate cert = certify_weights(problem, model, answer, out.weights);
  out.value = cert.value;
  out.gap = cert.gap();
  out.iterations = 1;
  if (!(out.gap <= options.tol)) {
    throw ConvergenceError("d_value: equalization did not certify the duality gap",
                           out.weights, out.value, out.gap);
  }
  return out;
}

OracleSolution solve(const ProblemInstance& problem, const BanditModel& model,
                     const OracleOptions& options) {
  const std::size_t K = problem.num_arms();
  OracleSolution sol;
  sol.d_values.assign(K, 0.0);
  std::vector<std::vector<double>> weights(K);
  for (Answer i = 0; i < K; ++i) {
    DValue dv = d_value(problem, model, i, options);
    sol.d_values[i] = dv.value;
    sol.gap = std::max(sol.gap, dv.gap);
    weights[i] = std::move(dv.weights);
  }
  sol.t_star_inv = *std::max_element(sol.d_values.begin(), sol.d_values.end());
  if (sol.t_star_inv <= 0.0) {
    sol.degenerate = true;
    sol.t_star_inv = 0.0;
    for (Answer i = 0; i < K; ++i) {
      sol.i_f.push_back(i);
      sol.weights[i] = uniform_weights(K);
    }
    return sol;
  }
  for (Answer i = 0; i < K; ++i) {
    if (sol.d_values[i] >= sol.t_star_inv - options.i_f_tol) {
      sol.i_f.push_back(i);
      sol.weights[i] = std::move(weights[i]);
    }
  }
  return sol;
}

OracleSolution brute_force(const ProblemInstance& problem, const BanditModel& model,
                           double weight_step, double lambda_step) {
  problem.check_model(model);
  const std::size_t K = problem.num_arms();
  if (K > 4) throw ValidationError("brute_force: at most 4 arms");
  if (!(weight_step > 0.0 && weight_step <= 1.0) || !(lambda_step > 0.0)) {
    throw ValidationError("brute_force: grid steps must be positive");
  }
  if (problem.kind() == ProblemKind::BestArm) {
    (void)i_star(problem, model);  // throws on tied maxima
  }

  const auto n = static_cast<std::size_t>(std::llround(1.0 / weight_step));
  // Number of compositions of n into K parts.
  double weight_nodes = 1.0;
  for (std::size_t j = 1; j < K; ++j) {
    weight_nodes *= static_cast<double>(n + j) / static_cast<double>(j);
  }
  const FamilySpec& family = problem.family();
  const double off = problem.alternative_offset();

  // Per (answer, competitor) pair: the λ-grid along the boundary segment
  // λ_i = x, λ_a = x + off, x between μ_i and μ_a − off.
  struct PairGrid {
    bool zero = false;
    std::vector<double> cost_answer;
    std::vector<double> cost_arm;
  };
  std::vector<std::vector<PairGrid>> grids(K, std::vector<PairGrid>(K));
  for (Answer i = 0; i < K; ++i) {
    for (Answer a = 0; a < K; ++a) {
      if (a == i) continue;
      PairGrid& g = grids[i][a];
      if (model[i] <= model[a] - off) {
        g.zero = true;
        continue;
      }
      double lo = std::min(model[i], model[a] - off);
      double hi = std::max(model[i], model[a] - off);
      if (family.is_bernoulli()) {
        lo = std::max(lo, 0.0);
        hi = std::min(hi, 1.0 - off);
      }
      const double line_nodes = std::floor((hi - lo) / lambda_step) + 2.0;
      if (line_nodes >= 1e8) throw CapExceededError("brute_force: λ grid too large");
      const auto m = static_cast<std::size_t>(line_nodes);
      for (std::size_t j = 0; j < m; ++j) {
        const double x = std::min(hi, lo + static_cast<double>(j) * lambda_step);
        g.cost_answer.push_back(kl(family, model[i], x));
        g.cost_arm.push_back(kl(family, model[a], x + off));
      }
    }
  }
  if (weight_nodes >= 1e8) throw CapExceededError("brute_force: weight grid too large");

  OracleSolution sol;
  sol.d_values.assign(K, 0.0);
  std::vector<std::vector<double>> argmax(K, uniform_weights(K));

  // The grid samples a convex function of x, so its minimum over the interior
  // nodes is found by bisecting on the sign of the forward difference. Only the
  // two end nodes can be infinite (Bernoulli boundary) and are checked apart.
  auto pair_inf = [&](const PairGrid& g, double wi, double wa) {
    if (g.zero) return 0.0;
    auto at = [&](std::size_t j) {
      double v = 0.0;
      if (wi > 0.0) v += wi * g.cost_answer[j];
      if (wa > 0.0) v += wa * g.cost_arm[j];
      return v;
    };
    const std::size_t m = g.cost_answer.size();
    double best = std::min(at(0), at(m - 1));
    if (m > 2) {
      std::size_t lo = 1;
      std::size_t hi = m - 2;
      while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (at(mid + 1) < at(mid)) {
          lo = mid + 1;
        } else {
          hi = mid;
        }
      }
      best = std::min(best, at(lo));
    }
    return best;
  };

  std::vector<std::size_t> parts(K, 0);
  std::vector<double> w(K);
  // Enumerate compositions of n into K nonnegative parts.
  auto visit = [&]() {
    for (std::size_t k = 0; k < K; ++k) w[k] = static_cast<double>(parts[k]) / static_cast<double>(n);
    for (Answer i = 0; i < K; ++i) {
      double inf_value = kInfinity;
      for (Answer a = 0; a < K && inf_value > sol.d_values[i]; ++a) {
        if (a == i) continue;
        inf_value = std::min(inf_value, pair_inf(grids[i][a], w[i], w[a]));
      }
      if (inf_value > sol.d_values[i]) {
        sol.d_values[i] = inf_value;
        argmax[i] = w;
      }
    }
  };
  // Iterative odometer over the first K-1 parts; the last part takes the rest.
  std::vector<std::size_t> idx(K - 1, 0);
  while (true) {
    std::size_t used = std::accumulate(idx.begin(), idx.end(), std::size_t{0});
    if (used <= n) {
      for (std::size_t k = 0; k + 1 < K; ++k) parts[k] = idx[k];
      parts[K - 1] = n - used;
      visit();
    }
    std::size_t pos = 0;
    while (pos < K - 1) {
      ++idx[pos];
      if (std::accumulate(idx.begin(), idx.end(), std::size_t{0}) <= n) break;
      idx[pos] = 0;
      ++pos;
    }
    if (pos == K - 1) break;
  }

  sol.t_star_inv = *std::max_element(sol.d_values.begin(), sol.d_values.end());
  sol.gap = weight_step;
  if (sol.t_star_inv <= 0.0) {
    sol.degenerate = true;
    sol.t_star_inv = 0.0;
    for (Answer i = 0; i < K; ++i) {
      sol.i_f.push_back(i);
      sol.weights[i] = uniform_weights(K);
    }
    return sol;
  }
  const double band = 1e-9;
  for (Answer i = 0; i < K; ++i) {
    if (sol.d_values[i] >= sol.t_star_inv - band) {
      sol.i_f.push_back(i);
      sol.weights[i] = argmax[i];
    }
  }
  return sol;
}

double char_time_lower_bound(double t_star_inv, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("lower bound: delta must be in (0,1)");
  if (!(t_star_inv >= 0.0)) throw ValidationError("lower bound: t_star_inv must be nonnegative");
  if (t_star_inv == 0.0) return kInfinity;
  return std::max(0.0, std::log(1.0 / (2.4 * delta)) / t_star_inv);
}

}  // namespace purex
