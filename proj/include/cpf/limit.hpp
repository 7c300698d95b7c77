#pragma once

#include <vector>

#include "cpf/cohesive_law.hpp"
#include "cpf/envelope.hpp"
#include "cpf/model.hpp"

namespace cpf {

/// Piecewise representation of a limit displacement: an absolutely
/// continuous part sampled per element plus a finite jump set. The Cantor
/// part is identically zero in this data model.
struct SBVProfile {
  std::vector<double> x;     // element edges, increasing, size ne+1
  std::vector<double> slope; // per-element derivative, size ne
  struct Jump {
    double x;
    double s; // amplitude > 0
  };
  std::vector<Jump> jumps;   // sorted, strictly inside or at the boundary
  double trace_a = 0.0, trace_b = 0.0;
};

struct LimitBreakdown {
  double bulk = 0.0;
  double jump = 0.0;
  double total() const { return bulk + jump; }
};

// int h**(|u'|) dx + sum g(|[u]|); the Cantor term contributes 0 by
// representation.
LimitBreakdown limit_energy(const SBVProfile& p, const EnvelopeTable& env,
                            const CohesiveLawTable& law);

enum class Regime { Elastic, Cohesive, Saturated };

struct DirichletSolution {
  double s_star = 0.0; // total jump amplitude in [0, L]
  double energy = 0.0;
  double bulk = 0.0;
  double jump = 0.0;
  Regime regime = Regime::Elastic;
};

// Minimizes ell h**((L-s)/ell) + g(s) over s in [0,L]; dense grid plus
// golden refinement. One total jump suffices by subadditivity of g.
DirichletSolution dirichlet_limit(const Model& m, const EnvelopeTable& env,
                                  const CohesiveLawTable& law, double L,
                                  double ell);

// Brute-force minimum over k jumps (k <= 3) splitting the total amplitude;
// verification of the single-jump reduction.
double kjump_oracle(const EnvelopeTable& env, const CohesiveLawTable& law,
                    double L, double ell, int k);

// min( phi(inf) L^2 / ell, 2 Psi(1) ).
double brittle_dirichlet_limit(const Model& m, double L, double ell);

// The sigma_bar = 0 limit is identically zero.
double sigma_zero_limit(double L);

} // namespace cpf
