#include "cpf/limit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace cpf {

namespace {

double golden_scalar(const std::function<double(double)>& f, double a, double b,
                     int iters, double* arg_out) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    }
  }
  if (arg_out) *arg_out = f1 <= f2 ? x1 : x2;
  return std::min(f1, f2);
}

// Dense scan plus golden refinement of phi(s) = ell h**((L-s)/ell) + g(s)
// over [0, L].
void minimize_total_jump(const EnvelopeTable& env, const CohesiveLawTable& law,
                         double L, double ell, double& s_star, double& value) {
  auto obj = [&](double s) {
    return ell * env.eval((L - s) / ell) + law.eval_g(s);
  };
  if (L <= 0.0) {
    s_star = 0.0;
    value = obj(0.0);
    return;
  }
  const int n = 2048;
  int best = 0;
  double bestv = obj(0.0);
  for (int j = 1; j < n; ++j) {
    const double s = L * j / (n - 1.0);
    const double v = obj(s);
    if (v < bestv) {
      bestv = v;
      best = j;
    }
  }
  const double lo = L * std::max(0, best - 1) / (n - 1.0);
  const double hi = L * std::min(n - 1, best + 1) / (n - 1.0);
  double arg = lo;
  const double refined = golden_scalar(obj, lo, hi, 80, &arg);
  if (refined < bestv) {
    bestv = refined;
    s_star = arg;
  } else {
    s_star = L * best / (n - 1.0);
  }
  value = bestv;
}

} // namespace

LimitBreakdown limit_energy(const SBVProfile& p, const EnvelopeTable& env,
                            const CohesiveLawTable& law) {
  if (p.x.size() < 2 || p.slope.size() + 1 != p.x.size())
    throw std::invalid_argument("SBV profile needs ne+1 edges and ne slopes");
  LimitBreakdown out;
  for (std::size_t e = 0; e < p.slope.size(); ++e) {
    const double len = p.x[e + 1] - p.x[e];
    if (!(len > 0.0))
      throw std::invalid_argument("SBV profile edges must be increasing");
    out.bulk += len * env.eval(std::abs(p.slope[e]));
  }
  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& j : p.jumps) {
    if (!(j.s > 0.0)) throw std::invalid_argument("jump amplitudes must be > 0");
    if (j.x < p.x.front() || j.x > p.x.back() || j.x <= prev)
      throw std::invalid_argument("jump locations must be sorted and inside");
    prev = j.x;
    out.jump += law.eval_g(j.s);
  }
  return out;
}

DirichletSolution dirichlet_limit(const Model& m, const EnvelopeTable& env,
                                  const CohesiveLawTable& law, double L,
                                  double ell) {
  if (L < 0.0) throw std::domain_error("dirichlet_limit needs L >= 0");
  if (!(ell > 0.0)) throw std::domain_error("dirichlet_limit needs ell > 0");
  DirichletSolution sol;
  minimize_total_jump(env, law, L, ell, sol.s_star, sol.energy);
  sol.bulk = ell * env.eval((L - sol.s_star) / ell);
  sol.jump = law.eval_g(sol.s_star);
  const double toughness = 2.0 * psi(m, 1.0);
  if (sol.s_star < 1e-6 * L || L == 0.0)
    sol.regime = Regime::Elastic;
  else if (sol.jump > 0.98 * toughness)
    sol.regime = Regime::Saturated;
  else
    sol.regime = Regime::Cohesive;
  return sol;
}

double kjump_oracle(const EnvelopeTable& env, const CohesiveLawTable& law,
                    double L, double ell, int k) {
  if (k < 1 || k > 3) throw std::domain_error("kjump_oracle needs k in {1,2,3}");
  if (L < 0.0) throw std::domain_error("kjump_oracle needs L >= 0");
  double s1 = 0.0, best = 0.0;
  minimize_total_jump(env, law, L, ell, s1, best);
  if (k >= 2 && L > 0.0) {
    const int n = 257;
    for (int i = 0; i < n; ++i) {
      const double a = L * i / (n - 1.0);
      for (int j = 0; i + j < n; ++j) {
        const double b = L * j / (n - 1.0);
        const double bulk = ell * env.eval((L - a - b) / ell);
        const double val = bulk + law.eval_g(a) + law.eval_g(b);
        if (val < best) best = val;
      }
    }
  }
  if (k >= 3 && L > 0.0) {
    const int n = 65;
    for (int i = 0; i < n; ++i) {
      const double a = L * i / (n - 1.0);
      for (int j = 0; i + j < n; ++j) {
        const double b = L * j / (n - 1.0);
        for (int q = 0; i + j + q < n; ++q) {
          const double c = L * q / (n - 1.0);
          const double bulk = ell * env.eval((L - a - b - c) / ell);
          const double val =
              bulk + law.eval_g(a) + law.eval_g(b) + law.eval_g(c);
          if (val < best) best = val;
        }
      }
    }
  }
  return best;
}

double brittle_dirichlet_limit(const Model& m, double L, double ell) {
  if (L < 0.0) throw std::domain_error("brittle limit needs L >= 0");
  if (!(ell > 0.0)) throw std::domain_error("brittle limit needs ell > 0");
  const double elastic = phi_inf(m) * L * L / ell;
  const double fracture = 2.0 * psi(m, 1.0);
  return std::min(elastic, fracture);
}

double sigma_zero_limit(double /*L*/) { return 0.0; }

} // namespace cpf
