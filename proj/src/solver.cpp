#include "cpf/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "cpf/io.hpp"
#include "cpf/parallel.hpp"

namespace cpf {

namespace {

constexpr double kVClamp = 1.0 - 1e-12;

// Elastic degradation factor phi(scale f^2(v)) + kappa, extended by
// continuity with phi(inf) at v = 1.
struct ElasticFactor {
  const Model* m;
  double scale;  // eps (cohesive) or gamma_eps (brittle)
  double kappa;
  double pinf;

  double operator()(double v) const {
    if (v >= 1.0) return pinf + kappa;
    const double vc = std::min(v, kVClamp);
    return m->phi(scale * m->fhat(vc) / m->Q(1.0 - vc)) + kappa;
  }

  // Chained central difference of the composed map, one-sided at the box
  // ends.
  double deriv(double v) const {
    const double d = 1e-6;
    const double hi = std::min(v + d, 1.0);
    const double lo = std::max(v - d, 0.0);
    if (hi <= lo) return 0.0;
    return ((*this)(hi) - (*this)(lo)) / (hi - lo);
  }
};

ElasticFactor make_factor(const Model& m, const SolveConfig& cfg) {
  return ElasticFactor{&m, cfg.mode == SolveMode::Cohesive ? cfg.eps : cfg.gamma_eps,
                       cfg.kappa_eps, phi_inf(m)};
}

void check_state(const DiscreteState& st, const Mesh1D& mesh) {
  if (mesh.n < 3) throw std::invalid_argument("mesh needs n >= 3");
  if (static_cast<int>(st.u.size()) != mesh.n ||
      static_cast<int>(st.v.size()) != mesh.n)
    throw std::invalid_argument("state size does not match mesh");
  for (double v : st.v)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("phase field left [0,1]");
}

} // namespace

SolveConfig make_config(const Model& m, double eps, SolveMode mode, double L) {
  m.check_rules();
  SolveConfig cfg;
  cfg.eps = eps;
  cfg.mode = mode;
  cfg.kappa_eps = m.kappa.at(eps);
  cfg.gamma_eps = m.gamma.at(eps);
  cfg.L = L;
  return cfg;
}

EnergyBreakdown energy(const DiscreteState& st, const Mesh1D& mesh,
                       const Model& m, const SolveConfig& cfg) {
  check_state(st, mesh);
  const ElasticFactor w = make_factor(m, cfg);
  const double h = mesh.h();
  EnergyBreakdown e;
  for (int k = 0; k + 1 < mesh.n; ++k) {
    const double du = (st.u[k + 1] - st.u[k]) / h;
    const double dv = (st.v[k + 1] - st.v[k]) / h;
    const double vm = 0.5 * (st.v[k] + st.v[k + 1]);
    e.elastic += h * w(vm) * du * du;
    e.potential += h * m.dpot(1.0 - vm) / (4.0 * cfg.eps);
    e.gradient += h * cfg.eps * dv * dv;
  }
  return e;
}

void u_step(DiscreteState& st, const Mesh1D& mesh, const Model& m,
            const SolveConfig& cfg) {
  check_state(st, mesh);
  const ElasticFactor wf = make_factor(m, cfg);
  const int n = mesh.n;
  std::vector<double> w(n - 1);
  for (int k = 0; k + 1 < n; ++k) {
    w[k] = wf(0.5 * (st.v[k] + st.v[k + 1]));
    if (!(w[k] > 0.0))
      throw ConfigError(
          "u_step: zero element weight makes the system singular; "
          "use kappa_eps > 0");
  }
  st.u.front() = 0.0;
  st.u.back() = cfg.L;
  const int ni = n - 2;
  if (ni <= 0) return;
  // Thomas algorithm on the SPD tridiagonal system.
  std::vector<double> diag(ni), rhs(ni, 0.0), sub(ni, 0.0);
  for (int i = 0; i < ni; ++i) {
    diag[i] = w[i] + w[i + 1];
    if (i > 0) sub[i] = -w[i];
  }
  rhs[0] = w[0] * st.u.front();
  rhs[ni - 1] += w[ni] * st.u.back();
  for (int i = 1; i < ni; ++i) {
    const double f = sub[i] / diag[i - 1];
    diag[i] -= f * (-w[i]);
    rhs[i] -= f * rhs[i - 1];
  }
  st.u[ni] = rhs[ni - 1] / diag[ni - 1];
  for (int i = ni - 2; i >= 0; --i)
    st.u[i + 1] = (rhs[i] + w[i + 1] * st.u[i + 2]) / diag[i];
}

void v_gradient(const DiscreteState& st, const Mesh1D& mesh, const Model& m,
                const SolveConfig& cfg, std::vector<double>& grad) {
  const ElasticFactor wf = make_factor(m, cfg);
  const double h = mesh.h();
  const int n = mesh.n;
  grad.assign(n, 0.0);
  for (int k = 0; k + 1 < n; ++k) {
    const double du = (st.u[k + 1] - st.u[k]) / h;
    const double dv = (st.v[k + 1] - st.v[k]) / h;
    const double vm = 0.5 * (st.v[k] + st.v[k + 1]);
    const double mid = 0.5 * h *
                       (wf.deriv(vm) * du * du -
                        m.dpot.derivative(1.0 - vm) / (4.0 * cfg.eps));
    grad[k] += mid - 2.0 * cfg.eps * dv;
    grad[k + 1] += mid + 2.0 * cfg.eps * dv;
  }
  grad.front() = grad.back() = 0.0; // pinned Dirichlet nodes
}

int v_step(DiscreteState& st, const Mesh1D& mesh, const Model& m,
           const SolveConfig& cfg) {
  check_state(st, mesh);
  const int n = mesh.n;
  double E = energy(st, mesh, m, cfg).total();
  std::vector<double> grad(n), trial(n);
  DiscreteState ts = st;
  double step = cfg.vstep.step0;
  int accepted = 0;
  for (int it = 0; it < cfg.vstep.max_inner; ++it) {
    v_gradient(st, mesh, m, cfg, grad);
    double gninf = 0.0;
    for (double gv : grad) gninf = std::max(gninf, std::abs(gv));
    if (gninf < 1e-16) break;
    if (step == 0.0) step = 0.1 / gninf;

    double alpha = step;
    bool ok = false;
    double Et = E;
    for (int ls = 0; ls < 60; ++ls) {
      for (int i = 0; i < n; ++i)
        trial[i] = std::clamp(st.v[i] - alpha * grad[i], 0.0, 1.0);
      trial.front() = st.v.front();
      trial.back() = st.v.back();
      ts.v = trial;
      Et = energy(ts, mesh, m, cfg).total();
      double pred = 0.0;
      for (int i = 0; i < n; ++i) pred += grad[i] * (st.v[i] - trial[i]);
      if (Et < E && E - Et >= 1e-4 * pred) {
        ok = true;
        break;
      }
      alpha *= cfg.vstep.backtrack;
    }
    if (!ok) break; // no admissible move, leave v unchanged
    const double relimp = (E - Et) / std::max(std::abs(E), 1e-300);
    st.v = trial;
    E = Et;
    ++accepted;
    step = std::min(alpha * 2.0, 1e12);
    if (relimp < cfg.vstep.tol_rel) break;
  }
  return accepted;
}

namespace {

DiscreteState affine_start(const Mesh1D& mesh, double L) {
  DiscreteState st;
  st.u.resize(mesh.n);
  st.v.assign(mesh.n, 1.0);
  for (int i = 0; i < mesh.n; ++i)
    st.u[i] = L * (mesh.x(i) - mesh.a) / (mesh.b - mesh.a);
  return st;
}

DiscreteState notch_start(const Mesh1D& mesh, double L, double eps,
                          double center, double depth) {
  DiscreteState st = affine_start(mesh, L);
  for (int i = 1; i + 1 < mesh.n; ++i) {
    const double r = (mesh.x(i) - center) / eps;
    st.v[i] = std::clamp(1.0 - depth * std::exp(-0.5 * r * r), 0.0, 1.0);
  }
  return st;
}

SolveResult run_single(const Mesh1D& mesh, const Model& m, const SolveConfig& cfg,
                       DiscreteState st) {
  SolveResult res;
  u_step(st, mesh, m, cfg);
  EnergyBreakdown eb = energy(st, mesh, m, cfg);
  res.trace.rows.push_back(eb);
  double E = eb.total();
  int outer = 0;
  for (; outer < cfg.max_outer; ++outer) {
    u_step(st, mesh, m, cfg);
    v_step(st, mesh, m, cfg);
    eb = energy(st, mesh, m, cfg);
    res.trace.rows.push_back(eb);
    const double Enew = eb.total();
    const double dec = E - Enew;
    E = Enew;
    if (dec < cfg.tol_rel_energy * std::max(std::abs(E), 1e-300)) {
      ++outer;
      break;
    }
  }
  res.outer_iters = outer;
  res.final_energy = eb;
  res.min_v = *std::min_element(st.v.begin(), st.v.end());
  const double h = mesh.h();
  for (int k = 0; k + 1 < mesh.n; ++k)
    res.max_strain = std::max(res.max_strain,
                              std::abs(st.u[k + 1] - st.u[k]) / h);
  res.state = std::move(st);
  return res;
}

} // namespace

SolveResult alternate_minimize(const Mesh1D& mesh, const Model& m,
                               const SolveConfig& cfg,
                               const std::vector<DiscreteState>* warm_starts) {
  const double mid = 0.5 * (mesh.a + mesh.b);
  std::vector<DiscreteState> starts;
  if (warm_starts)
    for (const auto& w : *warm_starts) starts.push_back(w);
  starts.push_back(affine_start(mesh, cfg.L));
  starts.push_back(notch_start(mesh, cfg.L, cfg.eps, mid, 0.9));
  if (cfg.extra_starts > 0) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> upos(mesh.a + 0.2 * (mesh.b - mesh.a),
                                                mesh.b - 0.2 * (mesh.b - mesh.a));
    std::uniform_real_distribution<double> udep(0.3, 0.95);
    for (int k = 0; k < cfg.extra_starts; ++k)
      starts.push_back(notch_start(mesh, cfg.L, cfg.eps, upos(rng), udep(rng)));
  }

  std::vector<SolveResult> results(starts.size());
  parallel_chunks(starts.size(), 1, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
      results[i] = run_single(mesh, m, cfg, starts[i]);
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i)
    if (results[i].final_energy.total() <
        results[best].final_energy.total() - 1e-12)
      best = i;
  results[best].start_index = static_cast<int>(best);
  return std::move(results[best]);
}

std::vector<ContinuationRow> continuation(const Model& m, const SolveConfig& base,
                                          const std::vector<double>& eps_list,
                                          double L, const Mesh1D& domain,
                                          double mesh_factor) {
  if (eps_list.empty()) throw ConfigError("continuation: empty eps list");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1]))
      throw ConfigError("continuation: eps list must be strictly decreasing");
  if (mesh_factor < 10.0)
    throw ConfigError("continuation: mesh rule requires h <= eps/10");

  std::vector<ContinuationRow> rows;
  DiscreteState prev;
  Mesh1D prev_mesh;
  bool have_prev = false;
  for (double eps : eps_list) {
    SolveConfig cfg = base;
    cfg.eps = eps;
    cfg.kappa_eps = m.kappa.at(eps);
    cfg.gamma_eps = m.gamma.at(eps);
    cfg.L = L;

    Mesh1D mesh = domain;
    const double span = domain.b - domain.a;
    mesh.n = std::max(3, static_cast<int>(std::ceil(span * mesh_factor / eps)) + 1);

    std::vector<DiscreteState> warm;
    if (have_prev) {
      DiscreteState w;
      w.u.resize(mesh.n);
      w.v.resize(mesh.n);
      for (int i = 0; i < mesh.n; ++i) {
        const double x = mesh.x(i);
        const double t =
            std::clamp((x - prev_mesh.a) / (prev_mesh.b - prev_mesh.a), 0.0, 1.0) *
            (prev_mesh.n - 1);
        const int j = std::min(prev_mesh.n - 2, static_cast<int>(t));
        const double wgt = t - j;
        w.u[i] = prev.u[j] + wgt * (prev.u[j + 1] - prev.u[j]);
        w.v[i] = std::clamp(prev.v[j] + wgt * (prev.v[j + 1] - prev.v[j]), 0.0, 1.0);
      }
      w.u.front() = 0.0;
      w.u.back() = L;
      w.v.front() = w.v.back() = 1.0;
      warm.push_back(std::move(w));
    }

    SolveResult res = alternate_minimize(mesh, m, cfg, warm.empty() ? nullptr : &warm);
    ContinuationRow row;
    row.eps = eps;
    row.n_nodes = mesh.n;
    row.energy = res.final_energy;
    row.min_v = res.min_v;
    row.max_strain = res.max_strain;
    row.state = res.state;
    rows.push_back(std::move(row));

    prev = rows.back().state;
    prev_mesh = mesh;
    have_prev = true;
  }
  return rows;
}

} // namespace cpf
