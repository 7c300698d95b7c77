#include "cpf/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cpf/io.hpp"

namespace cpf {

double KappaRule::at(double eps) const { return c * std::pow(eps, a); }
double GammaRule::at(double eps) const { return c * std::pow(eps, b); }

void Model::check_rules() const {
  if (!(kappa.a > 1.0) || kappa.c < 0.0)
    throw std::invalid_argument("kappa rule needs c >= 0 and exponent a > 1");
  if (!(gamma.b > 0.0) || !(gamma.b < 1.0) || !(gamma.c > 0.0))
    throw std::invalid_argument("gamma rule needs c > 0 and exponent b in (0,1)");
}

Model make_cfi_model(double lambda, double q) {
  Model m;
  m.fhat = ScalarFn::quadratic();
  m.Q = ScalarFn::scaled_power(lambda, q);
  m.dpot = ScalarFn::quadratic();
  m.phi = ScalarFn::min_with_one();
  return m;
}

Model make_wu_model(double p, double lambda, double q) {
  Model m;
  m.fhat = ScalarFn::power(p);
  m.Q = ScalarFn::scaled_power(lambda, q);
  m.dpot = ScalarFn::quadratic();
  m.phi = ScalarFn::rational();
  return m;
}

double eval_f_squared(const Model& m, double t) {
  if (t < 0.0 || t >= 1.0)
    throw std::domain_error("f is defined on [0,1); f(1) is not finite");
  if (t == 0.0) return 0.0;
  return m.fhat(t) / m.Q(1.0 - t);
}

double eval_f(const Model& m, double t) { return std::sqrt(eval_f_squared(m, t)); }

double eval_f_eps(const Model& m, double eps, double t) {
  if (!(eps > 0.0)) throw std::domain_error("eps must be positive");
  if (t < 0.0 || t > 1.0) throw std::domain_error("t must lie in [0,1]");
  if (t == 1.0) return 1.0;
  const double a = eps * m.fhat(t);
  const double b = m.Q(1.0 - t);
  if (a + b == 0.0) return 0.0;
  return std::sqrt(a / (a + b));
}

double eval_f_tilde_eps(const Model& m, double eps, double t) {
  if (!(eps > 0.0)) throw std::domain_error("eps must be positive");
  if (t < 0.0 || t > 1.0) throw std::domain_error("t must lie in [0,1]");
  if (t == 1.0) return 1.0;
  return std::min(1.0, std::sqrt(eps) * eval_f(m, t));
}

namespace {

// Aitken delta-squared acceleration on the tail of a sequence.
LimitEstimate aitken_tail(const std::vector<double>& r) {
  LimitEstimate est;
  est.value = r.back();
  est.residual = r.size() > 1 ? std::abs(r.back() - r[r.size() - 2])
                              : std::abs(r.back());
  double prev = est.value;
  bool have_prev = false;
  for (std::size_t i = r.size(); i >= 3; --i) {
    const double a = r[i - 3], b = r[i - 2], c = r[i - 1];
    const double denom = (c - b) - (b - a);
    if (std::abs(denom) < 1e-300) break;
    const double acc = c - (c - b) * (c - b) / denom;
    if (!std::isfinite(acc)) break;
    if (have_prev) {
      est.residual = std::abs(acc - prev);
      est.value = acc;
      break;
    }
    est.value = acc;
    prev = acc;
    have_prev = true;
  }
  return est;
}

} // namespace

SigmaBar sigma_bar(const Model& m) {
  double ed = 0, cd = 0, eq = 0, cq = 0;
  if (m.dpot.power_behavior_at_zero(ed, cd) &&
      m.Q.power_behavior_at_zero(eq, cq)) {
    if (ed > eq) return SigmaBar::zero();
    if (ed < eq) return SigmaBar::infinite();
    return SigmaBar::finite(std::sqrt(cd / cq));
  }

  std::vector<double> r;
  for (int k = 4; k <= 40; ++k) {
    const double t = std::ldexp(1.0, -k);
    const double q = m.Q(t);
    const double d = m.dpot(t);
    if (q <= 0.0) {
      if (d <= 0.0) continue;
      return SigmaBar::infinite();
    }
    r.push_back(std::sqrt(d / q));
  }
  if (r.size() < 6)
    throw NumericError("sigma_bar: limit not resolved (too few usable samples)");

  const std::size_t n = r.size();
  bool growing = true, tiny = true;
  for (std::size_t i = n - 5; i < n; ++i) {
    if (!(i > 0 && r[i] > 1.2 * r[i - 1])) growing = false;
    if (!(r[i] < 1e-6)) tiny = false;
  }
  if (growing) return SigmaBar::infinite();
  if (tiny) return SigmaBar::zero();

  // Reject non-monotone oscillation that is not settling down.
  int flips = 0;
  double last_delta = 0.0;
  for (std::size_t i = n - 8 < 1 ? 1 : n - 8; i < n; ++i) {
    const double delta = r[i] - r[i - 1];
    if (delta * last_delta < 0.0) ++flips;
    last_delta = delta;
  }
  const double spread = std::abs(r[n - 1] - r[n - 5]);
  if (flips >= 4 && spread > 1e-6 * std::max(1.0, std::abs(r[n - 1])))
    throw NumericError("sigma_bar: limit not resolved (oscillating samples)");

  const LimitEstimate est = aitken_tail(r);
  if (!(est.value > 0.0)) return SigmaBar::zero();
  return SigmaBar::finite(est.value, est.residual);
}

namespace {

double adaptive_simpson(const ScalarFn& d, double a, double b, double fa,
                        double fm, double fb, double whole, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = std::sqrt(d(1.0 - lm)), frm = std::sqrt(d(1.0 - rm));
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(d, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson(d, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

} // namespace

double psi(const Model& m, double t) {
  if (t < 0.0 || t > 1.0) throw std::domain_error("psi needs t in [0,1]");
  if (t == 0.0) return 0.0;
  const double fa = std::sqrt(m.dpot(1.0));
  const double fm = std::sqrt(m.dpot(1.0 - 0.5 * t));
  const double fb = std::sqrt(m.dpot(1.0 - t));
  const double whole = t / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(m.dpot, 0.0, t, fa, fm, fb, whole, 1e-10, 48);
}

LimitEstimate phi_prime0_est(const Model& m) {
  double e = 0, c = 0;
  if (m.phi.power_behavior_at_zero(e, c)) {
    if (e == 1.0) return {c, 0.0};
    if (e > 1.0) return {0.0, 0.0};
    return {std::numeric_limits<double>::infinity(), 0.0};
  }
  // Forward differences on h = 2^{-k} with Richardson-style acceleration.
  const double phi0 = m.phi(0.0);
  std::vector<double> d;
  for (int k = 2; k <= 30; ++k) {
    const double h = std::ldexp(1.0, -k);
    d.push_back((m.phi(h) - phi0) / h);
  }
  return aitken_tail(d);
}

LimitEstimate phi_inf_est(const Model& m) {
  switch (m.phi.family()) {
    case FnFamily::MinWithOne:
    case FnFamily::Rational:
      return {1.0, 0.0};
    case FnFamily::Power:
    case FnFamily::ScaledPower:
    case FnFamily::Quadratic:
      return {std::numeric_limits<double>::infinity(), 0.0};
    case FnFamily::Tabulated:
      break;
  }
  // Tail average over the last decade of the sampled range.
  const double tmax = m.phi.upper_sample_bound();
  const double lo = tmax / 10.0;
  const int n = 64;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = lo + (tmax - lo) * (i + 0.5) / n;
    acc += m.phi(t);
  }
  const double avg = acc / n;
  return {avg, std::abs(m.phi(tmax) - avg)};
}

double phi_prime0(const Model& m) { return phi_prime0_est(m).value; }
double phi_inf(const Model& m) { return phi_inf_est(m).value; }

namespace {

// Geometric grid accumulating toward both endpoints of [0,1].
std::vector<double> unit_grid(int n_samples) {
  std::vector<double> g;
  g.push_back(0.0);
  g.push_back(1.0);
  for (int k = 1; k <= 40; ++k) {
    const double t = std::ldexp(1.0, -k);
    g.push_back(t);
    g.push_back(1.0 - t);
  }
  const int fill = std::max(0, n_samples - static_cast<int>(g.size()));
  for (int i = 1; i <= fill; ++i) g.push_back(static_cast<double>(i) / (fill + 1));
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

} // namespace

HypothesisReport validate_hypotheses(const Model& m, int n_samples, double nbhd) {
  if (n_samples < 64)
    throw std::invalid_argument("validate_hypotheses needs n_samples >= 64");
  HypothesisReport rep;
  const auto grid = unit_grid(n_samples);

  auto fail = [&rep](bool& flag, const std::string& check, double t, double v) {
    flag = false;
    rep.witnesses.push_back({check, t, v});
  };

  // Hp1: fhat(1) = 1, fhat and Q vanish exactly at 0, Q and f non-decreasing
  // near 0.
  const double fhat1 = m.fhat(1.0);
  if (std::abs(fhat1 - 1.0) > 1e-12) fail(rep.hp1, "fhat(1)=1", 1.0, fhat1);
  if (m.fhat(0.0) != 0.0) fail(rep.hp1, "fhat(0)=0", 0.0, m.fhat(0.0));
  if (m.Q(0.0) != 0.0) fail(rep.hp1, "Q(0)=0", 0.0, m.Q(0.0));
  for (double t : grid) {
    if (t <= 0.0) continue;
    if (!(m.fhat(t) > 0.0)) {
      fail(rep.hp1, "fhat > 0 away from 0", t, m.fhat(t));
      break;
    }
  }
  for (double t : grid) {
    if (t <= 0.0) continue;
    if (!(m.Q(t) > 0.0)) {
      fail(rep.hp1, "Q > 0 away from 0", t, m.Q(t));
      break;
    }
  }
  double prev_q = 0.0, prev_f = 0.0, prev_t = -1.0;
  for (double t : grid) {
    if (t > nbhd) break;
    const double q = m.Q(t);
    const double f = t < 1.0 ? eval_f(m, t) : 0.0;
    if (prev_t >= 0.0) {
      if (q < prev_q - 1e-14) {
        fail(rep.hp1, "Q non-decreasing near 0", t, q);
        break;
      }
      if (f < prev_f - 1e-12 * std::max(1.0, prev_f)) {
        fail(rep.hp1, "f non-decreasing near 0", t, f);
        break;
      }
    }
    prev_q = q;
    prev_f = f;
    prev_t = t;
  }

  // Hp2: dpot vanishes exactly at 0 and the sigma_bar limit exists.
  if (m.dpot(0.0) != 0.0) fail(rep.hp2, "dpot(0)=0", 0.0, m.dpot(0.0));
  for (double t : grid) {
    if (t <= 0.0) continue;
    if (!(m.dpot(t) > 0.0)) {
      fail(rep.hp2, "dpot > 0 away from 0", t, m.dpot(t));
      break;
    }
  }
  try {
    rep.sigma = sigma_bar(m);
  } catch (const NumericError& e) {
    fail(rep.hp2, "sigma_bar limit exists", 0.0, 0.0);
    rep.sigma_note = e.what();
  }

  // Hp3: phi(0)=0, non-decreasing, phi(inf) finite positive.
  const double big = std::isfinite(m.phi.upper_sample_bound())
                         ? m.phi.upper_sample_bound()
                         : 1e6;
  if (m.phi(0.0) != 0.0) fail(rep.hp3, "phi(0)=0", 0.0, m.phi(0.0));
  double prev_phi = m.phi(0.0);
  double prev_tau = 0.0;
  for (double t : grid) {
    const double tau = t * big;
    const double v = m.phi(tau);
    if (v < prev_phi - 1e-12 * std::max(1.0, prev_phi)) {
      fail(rep.hp3, "phi non-decreasing", tau, v);
      break;
    }
    prev_phi = v;
    prev_tau = tau;
  }
  (void)prev_tau;
  rep.phi_inf = phi_inf_est(m);
  if (!(rep.phi_inf.value > 0.0) || !std::isfinite(rep.phi_inf.value))
    fail(rep.hp3, "phi(inf) in (0,inf)", big, rep.phi_inf.value);

  // Hp4: phi vanishes only at 0 and phi'(0+) is finite positive.
  for (double t : grid) {
    if (t <= 0.0) continue;
    if (!(m.phi(t * big / 1e3) > 0.0)) {
      fail(rep.hp4, "phi > 0 away from 0", t * big / 1e3, 0.0);
      break;
    }
  }
  rep.phi_prime0 = phi_prime0_est(m);
  if (!(rep.phi_prime0.value > 0.0) || !std::isfinite(rep.phi_prime0.value))
    fail(rep.hp4, "phi'(0+) in (0,inf)", 0.0, rep.phi_prime0.value);

  return rep;
}

} // namespace cpf
