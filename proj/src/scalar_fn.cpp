#include "cpf/scalar_fn.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cpf/io.hpp"

namespace cpf {

namespace {

// Fritsch-Carlson monotone cubic slopes.
std::vector<double> pchip_slopes(const std::vector<double>& x,
                                 const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> d(n, 0.0);
  if (n == 1) return d;
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    delta[i] = (y[i + 1] - y[i]) / h[i];
  }
  if (n == 2) {
    d[0] = d[1] = delta[0];
    return d;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  auto endpoint = [](double h0, double h1, double d0, double d1) {
    double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (d * d0 <= 0.0)
      d = 0.0;
    else if (d0 * d1 <= 0.0 && std::abs(d) > 3.0 * std::abs(d0))
      d = 3.0 * d0;
    return d;
  };
  d[0] = endpoint(h[0], h[1], delta[0], delta[1]);
  d[n - 1] = endpoint(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  return d;
}

} // namespace

ScalarFn ScalarFn::power(double p, FnDomain dom) {
  if (!(p > 0.0)) throw std::invalid_argument("power family needs p > 0");
  ScalarFn f;
  f.family_ = FnFamily::Power;
  f.domain_ = dom;
  f.p1_ = p;
  return f;
}

ScalarFn ScalarFn::scaled_power(double lambda, double q, FnDomain dom) {
  if (!(lambda > 0.0) || !(q > 0.0))
    throw std::invalid_argument("scaled-power family needs lambda > 0, q > 0");
  ScalarFn f;
  f.family_ = FnFamily::ScaledPower;
  f.domain_ = dom;
  f.p1_ = lambda;
  f.p2_ = q;
  return f;
}

ScalarFn ScalarFn::quadratic(FnDomain dom) {
  ScalarFn f;
  f.family_ = FnFamily::Quadratic;
  f.domain_ = dom;
  return f;
}

ScalarFn ScalarFn::min_with_one() {
  ScalarFn f;
  f.family_ = FnFamily::MinWithOne;
  f.domain_ = FnDomain::NonnegHalfline;
  return f;
}

ScalarFn ScalarFn::rational() {
  ScalarFn f;
  f.family_ = FnFamily::Rational;
  f.domain_ = FnDomain::NonnegHalfline;
  return f;
}

ScalarFn ScalarFn::tabulated(std::vector<double> t, std::vector<double> y,
                             FnDomain dom) {
  if (t.size() != y.size() || t.size() < 2)
    throw std::invalid_argument("tabulated function needs >= 2 samples");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i]) || !std::isfinite(y[i]) || y[i] < 0.0)
      throw std::invalid_argument("tabulated samples must be finite and >= 0");
    if (i > 0 && !(t[i] > t[i - 1]))
      throw std::invalid_argument("tabulated abscissae must be strictly increasing");
  }
  ScalarFn f;
  f.family_ = FnFamily::Tabulated;
  f.domain_ = dom;
  f.td_ = pchip_slopes(t, y);
  f.tx_ = std::move(t);
  f.ty_ = std::move(y);
  return f;
}

ScalarFn ScalarFn::tabulated_from_csv(const std::string& path, FnDomain dom) {
  auto rows = read_csv_pairs(path);
  std::vector<double> t(rows.size()), y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    t[i] = rows[i].first;
    y[i] = rows[i].second;
  }
  return tabulated(std::move(t), std::move(y), dom);
}

double ScalarFn::operator()(double t) const {
  switch (family_) {
    case FnFamily::Power:
      return std::pow(t, p1_);
    case FnFamily::ScaledPower:
      return std::pow(t, 2.0 * p2_) / (p1_ * p1_);
    case FnFamily::Quadratic:
      return t * t;
    case FnFamily::MinWithOne:
      return std::min(1.0, t);
    case FnFamily::Rational:
      return t / (1.0 + t);
    case FnFamily::Tabulated: {
      if (t <= tx_.front()) return ty_.front();
      if (t >= tx_.back()) return ty_.back();
      const auto it = std::upper_bound(tx_.begin(), tx_.end(), t);
      const std::size_t i = static_cast<std::size_t>(it - tx_.begin()) - 1;
      const double h = tx_[i + 1] - tx_[i];
      const double s = (t - tx_[i]) / h;
      const double s2 = s * s, s3 = s2 * s;
      return (2 * s3 - 3 * s2 + 1) * ty_[i] + (s3 - 2 * s2 + s) * h * td_[i] +
             (-2 * s3 + 3 * s2) * ty_[i + 1] + (s3 - s2) * h * td_[i + 1];
    }
  }
  return 0.0;
}

double ScalarFn::derivative(double t) const {
  switch (family_) {
    case FnFamily::Power:
      return p1_ * std::pow(t, p1_ - 1.0);
    case FnFamily::ScaledPower:
      return 2.0 * p2_ * std::pow(t, 2.0 * p2_ - 1.0) / (p1_ * p1_);
    case FnFamily::Quadratic:
      return 2.0 * t;
    case FnFamily::MinWithOne:
      return t < 1.0 ? 1.0 : 0.0;
    case FnFamily::Rational: {
      const double d = 1.0 + t;
      return 1.0 / (d * d);
    }
    case FnFamily::Tabulated: {
      if (t <= tx_.front() || t >= tx_.back()) return 0.0;
      const auto it = std::upper_bound(tx_.begin(), tx_.end(), t);
      const std::size_t i = static_cast<std::size_t>(it - tx_.begin()) - 1;
      const double h = tx_[i + 1] - tx_[i];
      const double s = (t - tx_[i]) / h;
      const double s2 = s * s;
      return ((6 * s2 - 6 * s) * ty_[i] + (3 * s2 - 4 * s + 1) * h * td_[i] +
              (-6 * s2 + 6 * s) * ty_[i + 1] + (3 * s2 - 2 * s) * h * td_[i + 1]) /
             h;
    }
  }
  return 0.0;
}

bool ScalarFn::power_behavior_at_zero(double& exponent, double& coeff) const {
  switch (family_) {
    case FnFamily::Power:
      exponent = p1_;
      coeff = 1.0;
      return true;
    case FnFamily::ScaledPower:
      exponent = 2.0 * p2_;
      coeff = 1.0 / (p1_ * p1_);
      return true;
    case FnFamily::Quadratic:
      exponent = 2.0;
      coeff = 1.0;
      return true;
    case FnFamily::MinWithOne:
    case FnFamily::Rational:
      exponent = 1.0;
      coeff = 1.0;
      return true;
    case FnFamily::Tabulated:
      return false;
  }
  return false;
}

double ScalarFn::upper_sample_bound() const {
  if (family_ == FnFamily::Tabulated) return tx_.back();
  return std::numeric_limits<double>::infinity();
}

std::string ScalarFn::describe() const {
  std::ostringstream ss;
  switch (family_) {
    case FnFamily::Power:
      ss << "power(" << p1_ << ")";
      break;
    case FnFamily::ScaledPower:
      ss << "scaled-power(lambda=" << p1_ << ",q=" << p2_ << ")";
      break;
    case FnFamily::Quadratic:
      ss << "quadratic";
      break;
    case FnFamily::MinWithOne:
      ss << "min-with-one";
      break;
    case FnFamily::Rational:
      ss << "rational";
      break;
    case FnFamily::Tabulated:
      ss << "tabulated(" << tx_.size() << " samples)";
      break;
  }
  return ss.str();
}

} // namespace cpf
