// Test-only oracles, independent of the library's solution paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "cpf/model.hpp"

namespace oracles {

// Dense tau-grid evaluation of inf_tau { phi(1/tau) t^2 + sigma^2/4 tau }.
// Brute force over a wide log grid plus the tau->0 limit value.
inline double h_sigma_dense(const cpf::Model& m, double sigma, double t,
                            int n = 200000) {
  if (t == 0.0) return 0.0;
  double best = cpf::phi_inf(m) * t * t; // tau -> 0+ limit
  const double lo = 1e-12, hi = 1e12;
  for (int j = 0; j < n; ++j) {
    const double tau = lo * std::pow(hi / lo, static_cast<double>(j) / (n - 1));
    const double v = m.phi(1.0 / tau) * t * t + 0.25 * sigma * sigma * tau;
    best = std::min(best, v);
  }
  return best;
}

// Exact optimum over a (x, gamma, beta) lattice for the sqrt-form profile
// energy: dynamic programming over 64 gamma levels x 64 beta levels on 64
// elements. Slow trusted baseline for g.
inline double g_lattice_dp(const cpf::Model& m, double s, int levels = 64,
                           int steps = 64) {
  const double phip = cpf::phi_prime0(m);
  const double clamp = 1.0 - 1e-12;
  const double h = 1.0 / steps;
  const int G = levels, B = levels;
  const double dgamma = s / (G - 1);
  const double dbeta = 1.0 / (B - 1);

  auto wgamma = [&](double beta) {
    const double b = std::min(beta, clamp);
    const double u = 1.0 - b;
    return m.dpot(u) / m.Q(u) * m.fhat(b);
  };

  // cost[b1][b2][k]: element cost when beta goes level b1 -> b2 and |gamma|
  // moves k levels.
  std::vector<double> cost(static_cast<std::size_t>(B) * B * G);
  for (int b1 = 0; b1 < B; ++b1)
    for (int b2 = 0; b2 < B; ++b2) {
      const double bm = 0.5 * (b1 + b2) * dbeta;
      const double W = phip * wgamma(bm);
      const double D = m.dpot(1.0 - bm);
      const double gb = (b2 - b1) * dbeta / h;
      for (int k = 0; k < G; ++k) {
        const double gg = k * dgamma / h;
        const double V = W * gg * gg + D * gb * gb;
        cost[(static_cast<std::size_t>(b1) * B + b2) * G + k] =
            V > 0.0 ? h * std::sqrt(V) : 0.0;
      }
    }

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(static_cast<std::size_t>(G) * B, inf), next(dist);
  dist[static_cast<std::size_t>(0) * B + (B - 1)] = 0.0; // gamma=0, beta=1
  for (int step = 0; step < steps; ++step) {
    std::fill(next.begin(), next.end(), inf);
    for (int g1 = 0; g1 < G; ++g1)
      for (int b1 = 0; b1 < B; ++b1) {
        const double d0 = dist[static_cast<std::size_t>(g1) * B + b1];
        if (d0 == inf) continue;
        for (int g2 = g1; g2 < G; ++g2) { // optimal gamma is monotone
          const int k = g2 - g1;
          const double* row = &cost[(static_cast<std::size_t>(b1) * B) * G];
          for (int b2 = 0; b2 < B; ++b2) {
            const double c = d0 + row[static_cast<std::size_t>(b2) * G + k];
            double& slot = next[static_cast<std::size_t>(g2) * B + b2];
            if (c < slot) slot = c;
          }
        }
      }
    dist.swap(next);
  }
  return dist[static_cast<std::size_t>(G - 1) * B + (B - 1)];
}

// Central finite differences of a scalar function of a vector.
template <class F>
std::vector<double> fd_gradient(F&& f, std::vector<double> x, double step) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double x0 = x[i];
    x[i] = x0 + step;
    const double fp = f(x);
    x[i] = x0 - step;
    const double fm = f(x);
    x[i] = x0;
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

} // namespace oracles
