#include "cpf/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cpf/io.hpp"
#include "cpf/parallel.hpp"

namespace cpf {

namespace {

constexpr double kFarFactor = 1e9;

double golden_min_log(const std::function<double(double)>& f, double lo,
                      double hi, int iters, double* arg_out) {
  // Golden-section on log-spaced tau; returns the minimum value.
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = std::log(lo), b = std::log(hi);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(std::exp(x1)), f2 = f(std::exp(x2));
  for (int i = 0; i < iters; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(std::exp(x1));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(std::exp(x2));
    }
  }
  const double xa = f1 <= f2 ? x1 : x2;
  if (arg_out) *arg_out = std::exp(xa);
  return std::min(f1, f2);
}

} // namespace

double h_sigma_pointwise(const Model& m, const SigmaBar& sigma, double t,
                         int tau_scan) {
  if (t < 0.0) throw std::domain_error("h_sigma needs t >= 0");
  if (t == 0.0) return 0.0;
  const double pinf = phi_inf(m);
  if (sigma.kind == SigmaKind::Zero) return 0.0;
  if (sigma.kind == SigmaKind::Infinite) return pinf * t * t;

  const double sg = sigma.value;
  const double t2 = t * t;
  auto objective = [&](double tau) {
    return m.phi(1.0 / tau) * t2 + 0.25 * sg * sg * tau;
  };

  // tau -> 0+ limit value; the infimum may only be approached there.
  double best = pinf * t2;

  const double hi = 4.0 / (sg * sg) * pinf * t2 + t;
  const double lo = hi * 1e-14;
  const double ratio = std::pow(hi / lo, 1.0 / (tau_scan - 1));
  int best_j = -1;
  double tau = lo;
  std::vector<double> vals(tau_scan);
  for (int j = 0; j < tau_scan; ++j) {
    vals[j] = objective(tau);
    if (best_j < 0 || vals[j] < vals[best_j]) best_j = j;
    tau *= ratio;
  }
  if (vals[best_j] < best) best = vals[best_j];

  const double tl = lo * std::pow(ratio, std::max(0, best_j - 1));
  const double th = lo * std::pow(ratio, std::min(tau_scan - 1, best_j + 1));
  const double refined = golden_min_log(objective, tl, th, 60, nullptr);
  return std::min(best, refined);
}

double recession_slope(const Model& m, const SigmaBar& sigma) {
  switch (sigma.kind) {
    case SigmaKind::Zero:
      return 0.0;
    case SigmaKind::Infinite:
      return std::numeric_limits<double>::infinity();
    case SigmaKind::Finite:
      return std::sqrt(phi_prime0(m)) * sigma.value;
  }
  return 0.0;
}

namespace {

EnvelopeTable build_impl(const Model& m, const SigmaBar& sigma, double t_max,
                         int n, int tau_scan, bool parallel) {
  if (n < 128) throw std::invalid_argument("build_envelope needs n >= 128");
  if (!(t_max > 0.0)) throw std::invalid_argument("build_envelope needs t_max > 0");

  EnvelopeTable tab;
  tab.sigma = sigma;
  tab.grid.resize(n);
  tab.raw.resize(n);
  for (int i = 0; i < n; ++i) {
    const double u = static_cast<double>(i) / (n - 1);
    tab.grid[i] = t_max * u * u;
  }

  auto fill = [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
      tab.raw[i] = h_sigma_pointwise(m, sigma, tab.grid[i], tau_scan);
  };
  if (parallel)
    parallel_chunks(static_cast<std::size_t>(n), 64, fill);
  else
    fill(0, static_cast<std::size_t>(n));

  const bool finite = sigma.kind == SigmaKind::Finite;
  tab.recession = finite ? recession_slope(m, sigma) : 0.0;

  // Lower convex hull by monotone chain over the samples. For finite sigma
  // a far node on the recession line y = m t pins the asymptotic slope; it
  // sits far enough out that its chord error over [0, t_max] is below 1e-8
  // relative.
  struct Pt {
    double x, y;
  };
  std::vector<Pt> pts;
  pts.reserve(n + 1);
  for (int i = 0; i < n; ++i) pts.push_back({tab.grid[i], tab.raw[i]});
  if (finite) {
    const double far = kFarFactor * std::max(t_max, 1.0);
    pts.push_back({far, tab.recession * far});
  }
  std::vector<Pt> chain;
  chain.reserve(pts.size());
  auto cross = [](const Pt& o, const Pt& a, const Pt& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
  for (const Pt& p : pts) {
    while (chain.size() >= 2 &&
           cross(chain[chain.size() - 2], chain.back(), p) <= 0.0)
      chain.pop_back();
    chain.push_back(p);
  }

  // Hull values at grid nodes and vertex indices.
  tab.hull.resize(n);
  std::size_t seg = 0;
  for (int i = 0; i < n; ++i) {
    const double t = tab.grid[i];
    while (seg + 2 < chain.size() && chain[seg + 1].x < t) ++seg;
    const Pt& a = chain[seg];
    const Pt& b = chain[seg + 1 < chain.size() ? seg + 1 : seg];
    if (b.x > a.x) {
      const double w = (t - a.x) / (b.x - a.x);
      tab.hull[i] = a.y + w * (b.y - a.y);
    } else {
      tab.hull[i] = a.y;
    }
    if (tab.hull[i] > tab.raw[i]) tab.hull[i] = tab.raw[i]; // guard fp noise
  }
  for (std::size_t v = 0; v < chain.size(); ++v) {
    const auto it = std::lower_bound(tab.grid.begin(), tab.grid.end(), chain[v].x);
    if (it != tab.grid.end() && *it == chain[v].x)
      tab.hull_breaks.push_back(static_cast<int>(it - tab.grid.begin()));
  }

  // Extension slope past t_max: the slope of the chain segment active at the
  // last grid node (for finite sigma that chord runs to the far node).
  {
    std::size_t k = 0;
    while (k + 2 < chain.size() && chain[k + 1].x < tab.grid.back()) ++k;
    if (k + 1 < chain.size() && chain[k + 1].x > chain[k].x)
      tab.extrap_slope =
          (chain[k + 1].y - chain[k].y) / (chain[k + 1].x - chain[k].x);
    else if (n >= 2)
      tab.extrap_slope = (tab.hull[n - 1] - tab.hull[n - 2]) /
                         (tab.grid[n - 1] - tab.grid[n - 2]);
  }

  if (finite) {
    tab.xi_estimate = 0.0;
    for (int i = 0; i < n; ++i)
      tab.xi_estimate =
          std::max(tab.xi_estimate, tab.recession * tab.grid[i] - tab.hull[i]);
    tab.tmax_warning =
        std::abs(tab.extrap_slope - tab.recession) > 0.01 * tab.recession;
  }
  return tab;
}

} // namespace

EnvelopeTable build_envelope(const Model& m, const SigmaBar& sigma,
                             double t_max, int n, int tau_scan) {
  return build_impl(m, sigma, t_max, n, tau_scan, true);
}

EnvelopeTable build_envelope_serial(const Model& m, const SigmaBar& sigma,
                                    double t_max, int n, int tau_scan) {
  return build_impl(m, sigma, t_max, n, tau_scan, false);
}

double EnvelopeTable::eval(double t) const {
  if (t < 0.0) throw std::domain_error("envelope eval needs t >= 0");
  if (t >= grid.back())
    return hull.back() + extrap_slope * (t - grid.back());
  const auto it = std::upper_bound(grid.begin(), grid.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - grid.begin());
  if (i == 0) return hull.front();
  const double w = (t - grid[i - 1]) / (grid[i] - grid[i - 1]);
  return hull[i - 1] + w * (hull[i] - hull[i - 1]);
}

void EnvelopeTable::write_csv(const std::string& path) const {
  cpf::write_csv(path, {"t", "raw", "hull"}, {grid, raw, hull});
}

} // namespace cpf
