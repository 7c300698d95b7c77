#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cpf/scalar_fn.hpp"

namespace cpf {

// kappa_eps = c * eps^a with a > 1, so kappa_eps = o(eps).
struct KappaRule {
  double c = 1.0;
  double a = 2.0;
  double at(double eps) const;
};

// gamma_eps = c * eps^b with b in (0,1), so gamma_eps/eps -> infinity.
struct GammaRule {
  double c = 1.0;
  double b = 0.5;
  double at(double eps) const;
};

/// One phase-field model: the quadruple (fhat, Q, dpot, phi) plus the
/// scaling rules for the perturbation kappa_eps and the brittle scale
/// gamma_eps. fhat, Q, dpot live on [0,1]; phi on [0,inf).
struct Model {
  ScalarFn fhat = ScalarFn::quadratic();
  ScalarFn Q = ScalarFn::quadratic();
  ScalarFn dpot = ScalarFn::quadratic();
  ScalarFn phi = ScalarFn::min_with_one();
  KappaRule kappa;
  GammaRule gamma;

  // Throws std::invalid_argument when a rule exponent is structurally
  // inadmissible (a <= 1 or b outside (0,1)).
  void check_rules() const;
};

// fhat = t^2, Q = lambda^{-2} t^{2q}, dpot = t^2, phi = 1 ∧ t.
Model make_cfi_model(double lambda = 1.0, double q = 1.0);
// fhat = t^p, Q = lambda^{-2} t^{2q}, dpot = t^2, phi = t/(1+t).
Model make_wu_model(double p = 2.0, double lambda = 1.0, double q = 1.0);

enum class SigmaKind { Finite, Infinite, Zero };

struct SigmaBar {
  SigmaKind kind = SigmaKind::Finite;
  double value = 0.0;    // meaningful for Finite only
  double residual = 0.0; // extrapolation residual, 0 for closed forms

  static SigmaBar finite(double v, double r = 0.0) { return {SigmaKind::Finite, v, r}; }
  static SigmaBar infinite() { return {SigmaKind::Infinite, 0.0, 0.0}; }
  static SigmaBar zero() { return {SigmaKind::Zero, 0.0, 0.0}; }
};

struct LimitEstimate {
  double value = 0.0;
  double residual = 0.0;
};

struct Witness {
  std::string check;
  double t = 0.0;
  double value = 0.0;
};

struct HypothesisReport {
  bool hp1 = true;
  bool hp2 = true;
  bool hp3 = true;
  bool hp4 = true;
  std::vector<Witness> witnesses;
  std::optional<SigmaBar> sigma;       // empty when the limit did not resolve
  std::string sigma_note;
  LimitEstimate phi_prime0{};
  LimitEstimate phi_inf{};
  bool all_pass() const { return hp1 && hp2 && hp3 && hp4; }
};

/// Checks (Hp1)-(Hp4) on a geometric grid accumulating toward 0 and 1.
/// Failures are reported with witness points, never thrown. `nbhd` is the
/// right neighbourhood of 0 on which monotonicity of Q and f is required.
HypothesisReport validate_hypotheses(const Model& m, int n_samples = 256,
                                     double nbhd = 0.1);

// f(t) = sqrt(fhat(t)/Q(1-t)) on [0,1). Throws std::domain_error at t = 1.
double eval_f(const Model& m, double t);
double eval_f_squared(const Model& m, double t);

// f_eps(t) = sqrt(eps fhat / (eps fhat + Q(1-t))), f_eps(1) = 1.
double eval_f_eps(const Model& m, double eps, double t);

// f~_eps(t) = 1 ∧ sqrt(eps) f(t), f~_eps(1) = 1.
double eval_f_tilde_eps(const Model& m, double eps, double t);

// sigma_bar = lim_{t->0+} sqrt(dpot(t)/Q(t)). Closed form when both leading
// behaviours are known; otherwise classified on the grid t_k = 2^{-k},
// k = 4..40 with Aitken extrapolation. Throws NumericError ("limit not
// resolved") on non-monotone oscillation.
SigmaBar sigma_bar(const Model& m);

// Psi(t) = int_0^t sqrt(dpot(1-tau)) dtau, adaptive quadrature, abs err 1e-10.
double psi(const Model& m, double t);

LimitEstimate phi_prime0_est(const Model& m);
LimitEstimate phi_inf_est(const Model& m);
double phi_prime0(const Model& m);
double phi_inf(const Model& m);

} // namespace cpf
