#include "cpf/cohesive_law.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <stdexcept>

#include "json.hpp"

#include "cpf/io.hpp"
#include "cpf/parallel.hpp"

namespace cpf {

namespace {

constexpr double kBetaClamp = 1.0 - 1e-12;

// Cumulative table for Psi(t) = int_0^t sqrt(dpot(1-tau)) dtau. Cubic
// Hermite between nodes (the integrand is the exact derivative), so the
// interpolation error is far below the quadrature tolerances used here.
class PsiTable {
public:
  explicit PsiTable(const Model& m, int n = 4096) : n_(n) {
    val_.resize(n_ + 1);
    der_.resize(n_ + 1);
    const double h = 1.0 / n_;
    val_[0] = 0.0;
    der_[0] = std::sqrt(m.dpot(1.0));
    for (int j = 0; j < n_; ++j) {
      const double a = j * h;
      const double mid = a + 0.5 * h;
      const double fm = std::sqrt(m.dpot(1.0 - mid));
      der_[j + 1] = std::sqrt(m.dpot(1.0 - (a + h)));
      val_[j + 1] = val_[j] + h / 6.0 * (der_[j] + 4.0 * fm + der_[j + 1]);
    }
  }

  double operator()(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return val_[n_];
    const double u = t * n_;
    const int j = std::min(n_ - 1, static_cast<int>(u));
    const double s = u - j;
    const double h = 1.0 / n_;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * val_[j] + (s3 - 2 * s2 + s) * h * der_[j] +
           (-2 * s3 + 3 * s2) * val_[j + 1] + (s3 - s2) * h * der_[j + 1];
  }

  double one() const { return val_[n_]; }

private:
  int n_;
  std::vector<double> val_, der_;
};

// Composed gamma-coupling weight dpot(1-b) fhat(b)/Q(1-b), evaluated with b
// clamped to 1-1e-12 in all factors: the continuous extension of the
// product (limit fhat(1) sigma_bar^2 at b = 1).
double w_gamma(const Model& m, double beta) {
  const double b = std::min(beta, kBetaClamp);
  const double u = 1.0 - b;
  return m.dpot(u) / m.Q(u) * m.fhat(b);
}

double w_gamma_deriv(const Model& m, double beta) {
  if (beta >= kBetaClamp) return 0.0;
  const double u = 1.0 - beta;
  const double du = std::max(1e-6 * u, 1e-13);
  const double bl = std::max(0.0, beta - du);
  const double bh = std::min(kBetaClamp, beta + du);
  if (bh <= bl) return 0.0;
  return (w_gamma(m, bh) - w_gamma(m, bl)) / (bh - bl);
}

double f_squared_clamped(const Model& m, double beta) {
  const double b = std::min(beta, kBetaClamp);
  return m.fhat(b) / m.Q(1.0 - b);
}

double f_squared_deriv(const Model& m, double beta) {
  if (beta >= kBetaClamp) return 0.0;
  const double u = 1.0 - beta;
  const double du = std::max(1e-6 * u, 1e-13);
  const double bl = std::max(0.0, beta - du);
  const double bh = std::min(kBetaClamp, beta + du);
  if (bh <= bl) return 0.0;
  return (f_squared_clamped(m, bh) - f_squared_clamped(m, bl)) / (bh - bl);
}

// ---------------------------------------------------------------------------
// Projected gradient descent over (gamma, beta) for the sqrt-form profile
// energy. gamma endpoints are pinned; beta endpoints are pinned to 1 unless
// eta > 0, in which case they move inside [1-eta, 1].
// ---------------------------------------------------------------------------

struct SqrtProblem {
  const Model* m = nullptr;
  double cgamma = 1.0;
  double eta = 0.0;
  std::vector<double> h; // element widths

  double energy(const std::vector<double>& g, const std::vector<double>& b) const {
    const std::size_t ne = h.size();
    double acc = 0.0;
    for (std::size_t e = 0; e < ne; ++e) {
      const double gg = (g[e + 1] - g[e]) / h[e];
      const double gb = (b[e + 1] - b[e]) / h[e];
      const double bm = 0.5 * (b[e] + b[e + 1]);
      const double V = cgamma * w_gamma(*m, bm) * gg * gg +
                       m->dpot(1.0 - bm) * gb * gb;
      if (V > 0.0) acc += h[e] * std::sqrt(V);
    }
    return acc;
  }

  void gradient(const std::vector<double>& g, const std::vector<double>& b,
                std::vector<double>& dg, std::vector<double>& db) const {
    const std::size_t n = g.size();
    std::fill(dg.begin(), dg.end(), 0.0);
    std::fill(db.begin(), db.end(), 0.0);
    for (std::size_t e = 0; e + 1 < n; ++e) {
      const double gg = (g[e + 1] - g[e]) / h[e];
      const double gb = (b[e + 1] - b[e]) / h[e];
      const double bm = 0.5 * (b[e] + b[e + 1]);
      const double W = w_gamma(*m, bm);
      const double D = m->dpot(1.0 - bm);
      const double V = cgamma * W * gg * gg + D * gb * gb;
      if (V <= 1e-300) continue;
      const double r = std::sqrt(V);
      const double tg = cgamma * W * gg / r;
      const double tb = D * gb / r;
      dg[e] -= tg;
      dg[e + 1] += tg;
      db[e] -= tb;
      db[e + 1] += tb;
      const double Wp = w_gamma_deriv(*m, bm);
      const double Dp = -m->dpot.derivative(1.0 - bm);
      const double tm = h[e] * (cgamma * Wp * gg * gg + Dp * gb * gb) / (4.0 * r);
      db[e] += tm;
      db[e + 1] += tm;
    }
    dg.front() = dg.back() = 0.0;
    if (eta <= 0.0) db.front() = db.back() = 0.0;
  }

  void project(std::vector<double>& g, std::vector<double>& b, double g0,
               double g1) const {
    g.front() = g0;
    g.back() = g1;
    const std::size_t n = b.size();
    for (std::size_t i = 0; i < n; ++i) b[i] = std::clamp(b[i], 0.0, 1.0);
    const double lo = eta > 0.0 ? 1.0 - eta : 1.0;
    b.front() = std::clamp(b.front(), lo, 1.0);
    b.back() = std::clamp(b.back(), lo, 1.0);
  }
};

// Quadratic-form profile energy for the alternative representation:
// int ( f^2(beta) |gamma'|^2 + dpot(1-beta)/4 + |beta'|^2 ).
struct RepVProblem {
  const Model* m = nullptr;
  double cgamma = 1.0;
  std::vector<double> h;
  double eta = 0.0; // endpoints stay pinned for this form

  double energy(const std::vector<double>& g, const std::vector<double>& b) const {
    double acc = 0.0;
    for (std::size_t e = 0; e < h.size(); ++e) {
      const double gg = (g[e + 1] - g[e]) / h[e];
      const double gb = (b[e + 1] - b[e]) / h[e];
      const double bm = 0.5 * (b[e] + b[e + 1]);
      acc += h[e] * (cgamma * f_squared_clamped(*m, bm) * gg * gg +
                     0.25 * m->dpot(1.0 - bm) + gb * gb);
    }
    return acc;
  }

  void gradient(const std::vector<double>& g, const std::vector<double>& b,
                std::vector<double>& dg, std::vector<double>& db) const {
    std::fill(dg.begin(), dg.end(), 0.0);
    std::fill(db.begin(), db.end(), 0.0);
    for (std::size_t e = 0; e < h.size(); ++e) {
      const double gg = (g[e + 1] - g[e]) / h[e];
      const double gb = (b[e + 1] - b[e]) / h[e];
      const double bm = 0.5 * (b[e] + b[e + 1]);
      const double F = f_squared_clamped(*m, bm);
      const double tg = 2.0 * cgamma * F * gg;
      const double tb = 2.0 * gb;
      dg[e] -= tg;
      dg[e + 1] += tg;
      db[e] -= tb;
      db[e + 1] += tb;
      const double Fp = f_squared_deriv(*m, bm);
      const double Dp = -m->dpot.derivative(1.0 - bm);
      const double tm = h[e] * (cgamma * Fp * gg * gg + 0.25 * Dp) * 0.5;
      db[e] += tm;
      db[e + 1] += tm;
    }
    dg.front() = dg.back() = 0.0;
    db.front() = db.back() = 0.0;
  }

  void project(std::vector<double>& g, std::vector<double>& b, double g0,
               double g1) const {
    g.front() = g0;
    g.back() = g1;
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = std::clamp(b[i], 0.0, 1.0);
    b.front() = b.back() = 1.0;
  }
};

template <class Problem>
double descend(const Problem& prob, std::vector<double>& g,
               std::vector<double>& b, double gend, int max_iters,
               double tol_rel, int patience, int* iters_out, bool* hit_max) {
  const std::size_t n = g.size();
  prob.project(g, b, 0.0, gend);
  double E = prob.energy(g, b);
  std::vector<double> dg(n), db(n), tg(n), tb(n);
  double step = 0.0;
  int flat = 0;
  int it = 0;
  for (; it < max_iters; ++it) {
    prob.gradient(g, b, dg, db);
    double gn2 = 0.0, gninf = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      gn2 += dg[i] * dg[i] + db[i] * db[i];
      gninf = std::max({gninf, std::abs(dg[i]), std::abs(db[i])});
    }
    if (gn2 < 1e-28) break;
    if (step == 0.0) step = 0.1 * std::max(1.0, gend) / (gninf + 1e-30);

    double alpha = step;
    bool accepted = false;
    double Et = E;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < n; ++i) {
        tg[i] = g[i] - alpha * dg[i];
        tb[i] = b[i] - alpha * db[i];
      }
      prob.project(tg, tb, 0.0, gend);
      Et = prob.energy(tg, tb);
      double pred = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        pred += dg[i] * (g[i] - tg[i]) + db[i] * (b[i] - tb[i]);
      if (Et < E && E - Et >= 1e-4 * pred) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
    const double relimp = (E - Et) / std::max(std::abs(E), 1e-300);
    g.swap(tg);
    b.swap(tb);
    E = Et;
    step = std::min(alpha * 2.0, 1e8);
    if (relimp < tol_rel) {
      if (++flat >= patience) {
        ++it;
        break;
      }
    } else {
      flat = 0;
    }
  }
  if (iters_out) *iters_out += it;
  if (hit_max && it >= max_iters) *hit_max = true;
  return E;
}

std::vector<double> uniform_nodes(int n) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = static_cast<double>(i) / (n - 1);
  return x;
}

// Plateau ansatz: beta ramps 1 -> 1-delta over the first third, stays flat,
// ramps back; gamma carries the whole jump across the middle third.
void plateau_start(int n, double s, double delta, double eta,
                   std::vector<double>& g, std::vector<double>& b) {
  g.assign(n, 0.0);
  b.assign(n, 1.0);
  const int i1 = n / 3, i2 = (2 * n) / 3;
  const double top = 1.0 - eta;
  const double bot = 1.0 - delta;
  for (int i = 0; i <= i1; ++i)
    b[i] = top + (bot - top) * static_cast<double>(i) / i1;
  for (int i = i1; i <= i2; ++i) b[i] = bot;
  for (int i = i2; i < n; ++i)
    b[i] = bot + (top - bot) * static_cast<double>(i - i2) / (n - 1 - i2);
  for (int i = i1; i <= i2; ++i)
    g[i] = s * static_cast<double>(i - i1) / (i2 - i1);
  for (int i = i2; i < n; ++i) g[i] = s;
}

void const_dip_start(int n, double s, double delta, double eta,
                     std::vector<double>& g, std::vector<double>& b) {
  g.resize(n);
  b.assign(n, 1.0 - delta);
  for (int i = 0; i < n; ++i) g[i] = s * static_cast<double>(i) / (n - 1);
  b.front() = b.back() = 1.0 - eta;
}

void resample_linear(const std::vector<double>& x, const std::vector<double>& y,
                     const std::vector<double>& xn, std::vector<double>& yn) {
  yn.resize(xn.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < xn.size(); ++i) {
    const double t = xn[i];
    while (j + 2 < x.size() && x[j + 1] < t) ++j;
    const double w = (t - x[j]) / (x[j + 1] - x[j]);
    yn[i] = y[j] + std::clamp(w, 0.0, 1.0) * (y[j + 1] - y[j]);
  }
}

struct GhatCore {
  double value = 0.0;
  double argmin = 1.0;
};

GhatCore g_hat_core(const Model& m, const PsiTable& Psi, double shat) {
  GhatCore out;
  if (shat <= 0.0) {
    out.value = 0.0;
    out.argmin = 1e-6;
    return out;
  }
  auto F = [&](double x) {
    return 2.0 * (Psi.one() - Psi(1.0 - x)) +
           std::sqrt(m.fhat(1.0 - x) * m.dpot(x) / m.Q(x)) * shat;
  };
  const int n = 1024;
  const double lo = 1e-12;
  const double ratio = std::pow(1.0 / lo, 1.0 / (n - 1));
  double x = lo;
  int best = 0;
  std::vector<double> vals(n);
  for (int j = 0; j < n; ++j) {
    vals[j] = F(x);
    if (vals[j] < vals[best]) best = j;
    x *= ratio;
  }
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = std::log(lo) + std::max(0, best - 1) * std::log(ratio);
  double bnd = std::log(lo) + std::min(n - 1, best + 1) * std::log(ratio);
  double x1 = bnd - gr * (bnd - a), x2 = a + gr * (bnd - a);
  double f1 = F(std::exp(x1)), f2 = F(std::exp(x2));
  for (int i = 0; i < 60; ++i) {
    if (f1 <= f2) {
      bnd = x2;
      x2 = x1;
      f2 = f1;
      x1 = bnd - gr * (bnd - a);
      f1 = F(std::exp(x1));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (bnd - a);
      f2 = F(std::exp(x2));
    }
  }
  if (f1 <= f2 && f1 < vals[best]) {
    out.value = f1;
    out.argmin = std::exp(x1);
  } else if (f2 < f1 && f2 < vals[best]) {
    out.value = f2;
    out.argmin = std::exp(x2);
  } else {
    out.value = vals[best];
    out.argmin = lo * std::pow(ratio, best);
  }
  return out;
}

struct GCore {
  double value = 0.0;
  GDiag diag;
  Profile winner;
};

// Shared driver for g and g_eta. Operates on the normalized problem
// (unit initial slope) with jump shat = sqrt(phi'(0+)) s.
GCore g_core(const Model& m, double shat, double eta, const LawOptimConfig& cfg,
             const Profile* extra_start) {
  GCore out;
  if (shat <= 0.0) {
    out.winner.x = uniform_nodes(cfg.nodes);
    out.winner.gamma.assign(cfg.nodes, 0.0);
    out.winner.beta.assign(cfg.nodes, 1.0);
    return out;
  }
  PsiTable Psi(m);
  const GhatCore gh = g_hat_core(m, Psi, shat);
  const double xstar = std::clamp(gh.argmin, 1e-6, 1.0);

  SqrtProblem prob;
  prob.m = &m;
  prob.cgamma = 1.0;
  prob.eta = eta;
  const int n = cfg.nodes;
  const auto xs = uniform_nodes(n);
  prob.h.assign(n - 1, 1.0 / (n - 1));

  std::vector<std::pair<std::vector<double>, std::vector<double>>> starts;
  for (double delta : {xstar, 0.25, 0.6, 0.95}) {
    std::vector<double> g, b;
    plateau_start(n, shat, std::clamp(delta, 1e-6, 1.0), eta, g, b);
    starts.emplace_back(std::move(g), std::move(b));
  }
  {
    std::vector<double> g, b;
    const_dip_start(n, shat, std::clamp(xstar, 1e-6, 1.0), eta, g, b);
    starts.emplace_back(std::move(g), std::move(b));
  }
  if (extra_start && extra_start->nodes() >= 2) {
    std::vector<double> g, b;
    resample_linear(extra_start->x, extra_start->gamma, xs, g);
    resample_linear(extra_start->x, extra_start->beta, xs, b);
    const double tail = g.back();
    if (tail > 0.0)
      for (double& v : g) v *= shat / tail;
    else
      for (int i = 0; i < n; ++i) g[i] = shat * xs[i];
    starts.emplace_back(std::move(g), std::move(b));
  }

  double best = std::numeric_limits<double>::infinity();
  std::vector<double> bg, bb;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    auto g = starts[k].first;
    auto b = starts[k].second;
    const double E = descend(prob, g, b, shat, cfg.max_iters, cfg.tol_rel,
                             cfg.patience, &out.diag.iters, &out.diag.hit_max);
    if (E < best - 1e-12) {
      best = E;
      out.diag.winner = static_cast<int>(k);
      bg = std::move(g);
      bb = std::move(b);
    }
  }

  out.winner.x = xs;
  out.winner.gamma = bg;
  out.winner.beta = bb;

  if (cfg.refine) {
    // Split the elements where |beta'| peaks and re-run from the
    // interpolated state.
    double bpmax = 0.0;
    for (int e = 0; e + 1 < n; ++e)
      bpmax = std::max(bpmax, std::abs(bb[e + 1] - bb[e]) * (n - 1.0));
    if (bpmax > 0.0) {
      std::vector<double> xr;
      xr.reserve(2 * n);
      for (int e = 0; e + 1 < n; ++e) {
        xr.push_back(xs[e]);
        if (std::abs(bb[e + 1] - bb[e]) * (n - 1.0) >= 0.5 * bpmax)
          xr.push_back(0.5 * (xs[e] + xs[e + 1]));
      }
      xr.push_back(1.0);
      SqrtProblem prob2 = prob;
      prob2.h.resize(xr.size() - 1);
      for (std::size_t e = 0; e + 1 < xr.size(); ++e)
        prob2.h[e] = xr[e + 1] - xr[e];
      std::vector<double> g2, b2;
      resample_linear(xs, bg, xr, g2);
      resample_linear(xs, bb, xr, b2);
      const double E2 = descend(prob2, g2, b2, shat, cfg.max_iters, cfg.tol_rel,
                                cfg.patience, &out.diag.iters, &out.diag.hit_max);
      if (E2 < best) {
        best = E2;
        out.winner.x = xr;
        out.winner.gamma = std::move(g2);
        out.winner.beta = std::move(b2);
      }
    }
  }

  out.value = best;
  out.diag.energy = best;
  return out;
}

} // namespace

double profile_energy(const Model& m, const Profile& p) {
  if (p.nodes() < 2 || p.gamma.size() != p.nodes() || p.beta.size() != p.nodes())
    throw std::invalid_argument("profile needs matching x/gamma/beta arrays");
  SqrtProblem prob;
  prob.m = &m;
  prob.cgamma = phi_prime0(m);
  prob.h.resize(p.nodes() - 1);
  for (std::size_t e = 0; e + 1 < p.nodes(); ++e) {
    prob.h[e] = p.x[e + 1] - p.x[e];
    if (!(prob.h[e] > 0.0))
      throw std::invalid_argument("profile nodes must be strictly increasing");
  }
  return prob.energy(p.gamma, p.beta);
}

double g_hat(const Model& m, double s) {
  if (s < 0.0) throw std::domain_error("g_hat needs s >= 0");
  if (s == 0.0) return 0.0;
  PsiTable Psi(m);
  return g_hat_core(m, Psi, std::sqrt(phi_prime0(m)) * s).value;
}

double g_hat_argmin(const Model& m, double s) {
  PsiTable Psi(m);
  return g_hat_core(m, Psi, std::sqrt(phi_prime0(m)) * s).argmin;
}

double g_value(const Model& m, double s, const LawOptimConfig& cfg, GDiag* diag,
               const Profile* extra_start, Profile* winner_out) {
  if (s < 0.0) throw std::domain_error("g needs s >= 0");
  const double shat = std::sqrt(phi_prime0(m)) * s;
  GCore core = g_core(m, shat, 0.0, cfg, extra_start);
  if (diag) *diag = core.diag;
  if (winner_out) *winner_out = std::move(core.winner);
  return core.value;
}

double g_eta(const Model& m, double s, double eta, const LawOptimConfig& cfg,
             GDiag* diag, const Profile* extra_start) {
  if (s < 0.0) throw std::domain_error("g_eta needs s >= 0");
  if (eta < 0.0 || eta > 1.0) throw std::domain_error("eta must lie in [0,1]");
  const double shat = std::sqrt(phi_prime0(m)) * s;
  GCore core = g_core(m, shat, eta, cfg, extra_start);
  if (diag) *diag = core.diag;
  return core.value;
}

double lambda0(const Model& m, double eta) {
  if (eta < 0.0 || eta > 1.0) throw std::domain_error("eta must lie in [0,1]");
  double mx = 0.0;
  const int n = 512;
  for (int i = 0; i < n; ++i) {
    const double t = eta * i / (n - 1.0);
    mx = std::max(mx, std::sqrt(m.dpot(t)));
  }
  return mx;
}

double g_repV_value(const Model& m, double s, const LawOptimConfig& cfg,
                    GDiag* diag) {
  if (s < 0.0) throw std::domain_error("g_repV needs s >= 0");
  if (s == 0.0) return 0.0;
  const double shat = std::sqrt(phi_prime0(m)) * s;
  PsiTable Psi(m);
  const double xstar = std::clamp(g_hat_core(m, Psi, shat).argmin, 1e-6, 1.0);

  const int n = cfg.repv_nodes;
  const auto xs = uniform_nodes(n);
  GDiag d;
  std::vector<double> warm_g, warm_b;
  auto eval_T = [&](double T) {
    RepVProblem prob;
    prob.m = &m;
    prob.cgamma = 1.0;
    prob.h.assign(n - 1, T / (n - 1));
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> bg, bb;
    for (int k = 0; k < (warm_g.empty() ? 2 : 3); ++k) {
      std::vector<double> g, b;
      if (k == 0)
        plateau_start(n, shat, xstar, 0.0, g, b);
      else if (k == 1)
        plateau_start(n, shat, 0.6, 0.0, g, b);
      else {
        g = warm_g;
        b = warm_b;
      }
      const double E = descend(prob, g, b, shat, cfg.repv_iters, cfg.tol_rel,
                               cfg.patience, &d.iters, &d.hit_max);
      if (E < best - 1e-12) {
        best = E;
        bg = std::move(g);
        bb = std::move(b);
      }
    }
    warm_g = std::move(bg);
    warm_b = std::move(bb);
    return best;
  };

  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = std::log(0.1), b = std::log(100.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = eval_T(std::exp(x1)), f2 = eval_T(std::exp(x2));
  double best = std::min(f1, f2);
  for (int i = 0; i < 30; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = eval_T(std::exp(x1));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = eval_T(std::exp(x2));
    }
    best = std::min({best, f1, f2});
  }
  d.energy = best;
  if (diag) *diag = d;
  return best;
}

namespace {

CohesiveLawTable build_table_impl(const Model& m,
                                  const std::vector<double>& s_grid, double eta,
                                  const LawOptimConfig& cfg, bool parallel) {
  for (std::size_t i = 1; i < s_grid.size(); ++i)
    if (!(s_grid[i] > s_grid[i - 1]))
      throw std::invalid_argument("law table s grid must be increasing");
  CohesiveLawTable tab;
  tab.s = s_grid;
  tab.eta = eta;
  const std::size_t nb = s_grid.size();
  tab.g.resize(nb);
  tab.ghat.resize(nb);
  tab.geta.resize(nb);
  tab.diag.resize(nb);

  auto worker = [&](std::size_t bgn, std::size_t end) {
    Profile warm;
    bool have_warm = false;
    for (std::size_t i = bgn; i < end; ++i) {
      const double s = s_grid[i];
      tab.ghat[i] = g_hat(m, s);
      Profile win;
      GDiag d;
      tab.g[i] = g_value(m, s, cfg, &d, have_warm ? &warm : nullptr, &win);
      if (eta > 0.0) {
        GDiag de;
        tab.geta[i] = g_eta(m, s, eta, cfg, &de, &win);
        d.iters += de.iters;
        d.hit_max = d.hit_max || de.hit_max;
        // The relaxed feasible set contains the pinned one.
        tab.geta[i] = std::min(tab.geta[i], tab.g[i]);
      } else {
        tab.geta[i] = tab.g[i];
      }
      tab.diag[i] = d;
      warm = std::move(win);
      have_warm = true;
    }
  };
  if (parallel)
    parallel_chunks(nb, 32, worker);
  else
    worker(0, nb);
  return tab;
}

} // namespace

CohesiveLawTable build_law_table(const Model& m, const std::vector<double>& s_grid,
                                 double eta, const LawOptimConfig& cfg) {
  return build_table_impl(m, s_grid, eta, cfg, true);
}

CohesiveLawTable build_law_table_serial(const Model& m,
                                        const std::vector<double>& s_grid,
                                        double eta, const LawOptimConfig& cfg) {
  return build_table_impl(m, s_grid, eta, cfg, false);
}

double CohesiveLawTable::eval_g(double sq) const {
  if (s.empty()) throw std::logic_error("empty law table");
  if (sq <= s.front()) return g.front();
  if (sq >= s.back()) return g.back();
  const auto it = std::upper_bound(s.begin(), s.end(), sq);
  const std::size_t i = static_cast<std::size_t>(it - s.begin());
  const double w = (sq - s[i - 1]) / (s[i] - s[i - 1]);
  return g[i - 1] + w * (g[i] - g[i - 1]);
}

void CohesiveLawTable::write_csv(const std::string& path) const {
  cpf::write_csv(path, {"s", "g", "ghat", "geta"}, {s, g, ghat, geta});
}

void CohesiveLawTable::write_json(const std::string& path) const {
  nlohmann::json j;
  j["eta"] = eta;
  j["s"] = s;
  j["g"] = g;
  j["ghat"] = ghat;
  j["geta"] = geta;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& d : diag)
    rows.push_back({{"iters", d.iters},
                    {"winner", d.winner},
                    {"hit_max", d.hit_max},
                    {"energy", d.energy}});
  j["diagnostics"] = rows;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

} // namespace cpf
