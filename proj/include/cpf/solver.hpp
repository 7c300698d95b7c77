#pragma once

#include <cstdint>
#include <vector>

#include "cpf/model.hpp"

namespace cpf {

struct Mesh1D {
  double a = 0.0, b = 1.0;
  int n = 3; // node count, >= 3

  double h() const { return (b - a) / (n - 1); }
  double x(int i) const { return a + h() * i; }
};

// Nodal fields. v stays inside [0,1]; with Dirichlet data u(a)=0, u(b)=L and
// v(a)=v(b)=1.
struct DiscreteState {
  std::vector<double> u, v;
};

enum class SolveMode { Cohesive, Brittle };

struct SolveConfig {
  double eps = 0.1;
  SolveMode mode = SolveMode::Cohesive;
  double kappa_eps = 0.0; // resolved value of kappa at eps
  double gamma_eps = 0.0; // resolved value of gamma at eps (brittle mode)
  double L = 0.0;         // Dirichlet datum u(b) = L, u(a) = 0
  double tol_rel_energy = 1e-8;
  int max_outer = 2000;
  struct {
    double step0 = 0.0; // 0: pick from the first gradient
    double backtrack = 0.5;
    int max_inner = 80;
    double tol_rel = 1e-11;
  } vstep;
  int extra_starts = 0;    // seeded perturbations of the notch start
  std::uint64_t seed = 42;
};

// Resolves kappa_eps / gamma_eps from the model rules.
SolveConfig make_config(const Model& m, double eps, SolveMode mode, double L);

struct EnergyBreakdown {
  double elastic = 0.0;   // (phi(.) + kappa_eps) |u'|^2
  double potential = 0.0; // dpot(1-v)/(4 eps)
  double gradient = 0.0;  // eps |v'|^2
  double total() const { return elastic + potential + gradient; }
};

// Element-midpoint quadrature of the regularized functional. The elastic
// factor phi(scale f^2(v)) uses v clamped to 1-1e-12 and takes the value
// phi(inf) at v = 1 exactly. Throws std::invalid_argument when v leaves
// [0,1].
EnergyBreakdown energy(const DiscreteState& st, const Mesh1D& mesh,
                       const Model& m, const SolveConfig& cfg);

// Exact minimization in u at fixed v: SPD tridiagonal solve with the
// Dirichlet data. Throws ConfigError when an element weight vanishes
// (kappa_eps = 0 makes the system singular).
void u_step(DiscreteState& st, const Mesh1D& mesh, const Model& m,
            const SolveConfig& cfg);

// Projected gradient descent in v on [0,1]^N with pinned boundary nodes.
// Returns the number of accepted inner iterations.
int v_step(DiscreteState& st, const Mesh1D& mesh, const Model& m,
           const SolveConfig& cfg);

// Analytic-form gradient used by v_step (exposed for verification).
void v_gradient(const DiscreteState& st, const Mesh1D& mesh, const Model& m,
                const SolveConfig& cfg, std::vector<double>& grad);

struct EnergyTrace {
  std::vector<EnergyBreakdown> rows; // one per accepted outer iteration
};

struct SolveResult {
  DiscreteState state;
  EnergyTrace trace;
  EnergyBreakdown final_energy;
  int outer_iters = 0;
  int start_index = -1;
  double min_v = 1.0;
  double max_strain = 0.0; // max element |u'|
};

// Staggered scheme over the given starts plus the two canonical ones
// (u affine & v = 1; u affine & notched v). Returns the lowest-energy run.
SolveResult alternate_minimize(const Mesh1D& mesh, const Model& m,
                               const SolveConfig& cfg,
                               const std::vector<DiscreteState>* warm_starts = nullptr);

struct ContinuationRow {
  double eps = 0.0;
  int n_nodes = 0;
  EnergyBreakdown energy;
  double min_v = 1.0;
  double max_strain = 0.0;
  DiscreteState state;
};

// Decreasing eps sweep with warm starting; mesh keeps h <= eps/mesh_factor.
// Throws ConfigError when eps_list is not strictly decreasing or
// mesh_factor < 10.
std::vector<ContinuationRow> continuation(const Model& m, const SolveConfig& base,
                                          const std::vector<double>& eps_list,
                                          double L, const Mesh1D& domain,
                                          double mesh_factor = 10.0);

} // namespace cpf
