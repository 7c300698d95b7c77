#pragma once

#include <limits>
#include <string>
#include <vector>

namespace cpf {

enum class FnFamily { Power, ScaledPower, Quadratic, MinWithOne, Rational, Tabulated };
enum class FnDomain { UnitInterval, NonnegHalfline };

/// A scalar material function. Built-in families are evaluated in closed
/// form; tabulated data uses shape-preserving (Fritsch-Carlson) piecewise
/// cubic interpolation and clamps to the endpoint values outside the
/// sampled range.
class ScalarFn {
public:
  static ScalarFn power(double p, FnDomain d = FnDomain::UnitInterval);
  // lambda^{-2} * t^{2q}
  static ScalarFn scaled_power(double lambda, double q,
                               FnDomain d = FnDomain::UnitInterval);
  static ScalarFn quadratic(FnDomain d = FnDomain::UnitInterval);
  static ScalarFn min_with_one(); // 1 ∧ t on [0,∞)
  static ScalarFn rational();     // t/(1+t) on [0,∞)
  // Samples must be strictly increasing in t with finite values >= 0.
  // Throws std::invalid_argument otherwise.
  static ScalarFn tabulated(std::vector<double> t, std::vector<double> y,
                            FnDomain d);
  static ScalarFn tabulated_from_csv(const std::string& path, FnDomain d);

  double operator()(double t) const;
  double derivative(double t) const;

  FnFamily family() const { return family_; }
  FnDomain domain() const { return domain_; }

  // Leading behaviour value ~ coeff * t^exponent as t -> 0+. False for
  // tabulated input (no closed form).
  bool power_behavior_at_zero(double& exponent, double& coeff) const;

  // Largest abscissa the function is backed by: last sample for tabulated
  // data, +inf for closed forms.
  double upper_sample_bound() const;

  std::string describe() const;

private:
  ScalarFn() = default;

  FnFamily family_ = FnFamily::Power;
  FnDomain domain_ = FnDomain::UnitInterval;
  double p1_ = 1.0; // power exponent / lambda
  double p2_ = 0.0; // q for scaled power
  std::vector<double> tx_, ty_, td_; // tabulated nodes, values, slopes
};

} // namespace cpf
