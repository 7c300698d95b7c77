#pragma once

#include <string>
#include <vector>

#include "cpf/model.hpp"

namespace cpf {

// Effective bulk density h_sigma(t) = inf_{tau>0} { phi(1/tau) t^2 + sigma^2/4 tau }.
// sigma zero gives 0, sigma infinite gives phi(inf) t^2. The tau->0+ limit
// value phi(inf) t^2 is always included as a candidate, so infima attained
// only in the limit are handled exactly. Throws std::domain_error for t < 0.
double h_sigma_pointwise(const Model& m, const SigmaBar& sigma, double t,
                         int tau_scan = 128);

/// Sampled h_sigma together with its lower convex hull on a graded grid
/// (square-root clustering near 0). Immutable once built.
struct EnvelopeTable {
  SigmaBar sigma;
  std::vector<double> grid;   // increasing, grid[0] = 0
  std::vector<double> raw;    // h_sigma(grid[i])
  std::vector<double> hull;   // convex envelope values at grid nodes
  std::vector<int> hull_breaks; // grid indices of hull vertices
  double recession = 0.0;     // sqrt(phi'(0+)) * sigma for finite sigma
  double extrap_slope = 0.0;  // slope used past the last grid node
  double xi_estimate = 0.0;   // max over grid of (recession*t - hull)
  bool tmax_warning = false;  // linear regime not resolved within 1%

  double t_max() const { return grid.back(); }
  // Piecewise linear between grid nodes, exact at nodes, linear extension
  // beyond the grid with extrap_slope.
  double eval(double t) const;
  void write_csv(const std::string& path) const; // columns t, raw, hull
};

EnvelopeTable build_envelope(const Model& m, const SigmaBar& sigma,
                             double t_max, int n, int tau_scan = 128);
// Reference single-thread implementation; bit-identical to build_envelope.
EnvelopeTable build_envelope_serial(const Model& m, const SigmaBar& sigma,
                                    double t_max, int n, int tau_scan = 128);

// sqrt(phi'(0+)) * sigma; 0 for sigma = 0, +inf for sigma = infinite.
double recession_slope(const Model& m, const SigmaBar& sigma);

} // namespace cpf
