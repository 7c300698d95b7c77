#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpf/model.hpp"

namespace cpf {

/// A discretized optimal-profile candidate (gamma, beta) on increasing
/// nodes x with x.front() = 0. gamma(0) = 0, gamma(T) = s; beta in [0,1]
/// with boundary values 1 (or >= 1-eta for the relaxed membership).
struct Profile {
  std::vector<double> x, gamma, beta;
  std::size_t nodes() const { return x.size(); }
};

struct LawOptimConfig {
  int nodes = 401;
  int max_iters = 4000;
  double tol_rel = 1e-12;   // relative energy decrease per iteration
  int patience = 40;        // consecutive near-flat iterations before stop
  bool refine = true;       // one local-refinement pass where |beta'| peaks
  int repv_nodes = 201;
  int repv_iters = 1500;
};

struct GDiag {
  int iters = 0;       // total descent iterations across starts
  int winner = -1;     // index of the winning start
  bool hit_max = false;
  double energy = 0.0;
};

// Midpoint-rule value of
//   int sqrt( dpot(1-beta) (phi'(0+) f^2(beta) |gamma'|^2 + |beta'|^2) ) dx.
// The gamma coupling weight dpot(1-beta) f^2(beta) is evaluated with beta
// clamped to 1-1e-12, i.e. with the continuous extension of the composed
// product (its limit at beta = 1 is fhat(1) sigma_bar^2).
double profile_energy(const Model& m, const Profile& p);

// Upper approximation of g(s) by multistarted projected gradient descent.
// The jump is rescaled first so the optimizer always runs at unit initial
// slope: g(s) = g_1(sqrt(phi'(0+)) s).
double g_value(const Model& m, double s, const LawOptimConfig& cfg = {},
               GDiag* diag = nullptr, const Profile* extra_start = nullptr,
               Profile* winner_out = nullptr);

// Explicit upper bound inf_x { 2(Psi(1)-Psi(1-x)) + sqrt(phi'(0+)
// fhat(1-x) dpot(x)/Q(x)) s }.
double g_hat(const Model& m, double s);
double g_hat_argmin(const Model& m, double s);

// Same optimizer with the relaxed boundary condition beta(0), beta(1) >= 1-eta.
double g_eta(const Model& m, double s, double eta,
             const LawOptimConfig& cfg = {}, GDiag* diag = nullptr,
             const Profile* extra_start = nullptr);

// lambda_0(eta) = max of sqrt(dpot) on [0, eta], 512 samples.
double lambda0(const Model& m, double eta);

// Alternative representation: inf over T of the quadratic-form profile
// energy on [0,T]; golden section over log T in [0.1, 100].
double g_repV_value(const Model& m, double s, const LawOptimConfig& cfg = {},
                    GDiag* diag = nullptr);

struct CohesiveLawTable {
  std::vector<double> s, g, ghat, geta;
  double eta = 0.0;
  std::vector<GDiag> diag;

  double eval_g(double s) const; // monotone piecewise-linear, clamped ends
  void write_csv(const std::string& path) const;  // s, g, ghat, geta
  void write_json(const std::string& path) const; // values + diagnostics
};

// Builds the table over s_grid (must be increasing). Chunks of 32 points
// are processed independently; the warm start chains inside a chunk only,
// so results do not depend on the thread count.
CohesiveLawTable build_law_table(const Model& m, const std::vector<double>& s_grid,
                                 double eta, const LawOptimConfig& cfg = {});
CohesiveLawTable build_law_table_serial(const Model& m,
                                        const std::vector<double>& s_grid,
                                        double eta,
                                        const LawOptimConfig& cfg = {});

} // namespace cpf
