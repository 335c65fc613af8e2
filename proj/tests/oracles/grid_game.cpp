#include "oracles/grid_game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace purex::testref {

double grid_best_response(const KlFn& kl, const std::vector<double>& w,
                          const std::vector<double>& mu, std::size_t i, double off,
                          double lambda_step) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < mu.size(); ++a) {
    if (a == i) continue;
    const double lo = mu[a] - off;
    const double hi = mu[i];
    if (hi <= lo) return 0.0;
    const int n = std::max(2, static_cast<int>(std::ceil((hi - lo) / lambda_step)));
    for (int s = 0; s <= n; ++s) {
      const double x = lo + (hi - lo) * s / n;
      double v = 0.0;
      if (w[i] > 0.0) v += w[i] * kl(mu[i], x);
      if (w[a] > 0.0) v += w[a] * kl(mu[a], x + off);
      best = std::min(best, v);
    }
  }
  return best;
}

GridGame grid_game(const KlFn& kl, const std::vector<double>& mu, double off,
                   double weight_step, double lambda_step) {
  const std::size_t K = mu.size();
  if (K != 2 && K != 3) throw std::invalid_argument("grid_game: K must be 2 or 3");
  const int n = static_cast<int>(std::lround(1.0 / weight_step));
  GridGame g;
  g.d_values.assign(K, -1.0);
  g.weights.assign(K, {});
  auto visit = [&](const std::vector<double>& w) {
    for (std::size_t i = 0; i < K; ++i) {
      const double v = grid_best_response(kl, w, mu, i, off, lambda_step);
      if (v > g.d_values[i]) {
        g.d_values[i] = v;
        g.weights[i] = w;
      }
    }
  };
  for (int a = 0; a <= n; ++a) {
    if (K == 2) {
      visit({static_cast<double>(a) / n, static_cast<double>(n - a) / n});
      continue;
    }
    for (int b = 0; a + b <= n; ++b) {
      visit({static_cast<double>(a) / n, static_cast<double>(b) / n,
             static_cast<double>(n - a - b) / n});
    }
  }
  g.t_star_inv = *std::max_element(g.d_values.begin(), g.d_values.end());
  return g;
}

}  // namespace purex::testref
