#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "cpf/io.hpp"
#include "cpf/model.hpp"

using namespace cpf;

namespace {

ScalarFn tabulate(const ScalarFn& f, double lo, double hi, int n,
                  FnDomain dom, double scale = 1.0, bool log_spaced = false) {
  std::vector<double> t, y;
  if (log_spaced) {
    t.push_back(0.0);
    y.push_back(scale * f(0.0));
    for (int i = 0; i < n; ++i)
      t.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  } else {
    for (int i = 0; i < n; ++i) t.push_back(lo + (hi - lo) * i / (n - 1.0));
  }
  while (y.size() < t.size()) y.push_back(scale * f(t[y.size()]));
  return ScalarFn::tabulated(t, y, dom);
}

} // namespace

TEST_CASE("validate_hypotheses: CFI built-in passes everything") {
  const Model m = make_cfi_model(1.0, 1.0);
  const auto rep = validate_hypotheses(m, 256);
  CHECK(rep.all_pass());
  REQUIRE(rep.sigma.has_value());
  CHECK(rep.sigma->kind == SigmaKind::Finite);
  CHECK(rep.sigma->value == doctest::Approx(1.0));
  CHECK(rep.witnesses.empty());
}

TEST_CASE("validate_hypotheses: rational phi gives phi(inf)=phi'(0+)=1") {
  Model m = make_cfi_model();
  m.phi = ScalarFn::rational();
  const auto rep = validate_hypotheses(m, 128);
  CHECK(rep.hp3);
  CHECK(rep.hp4);
  CHECK(rep.phi_inf.value == doctest::Approx(1.0));
  CHECK(rep.phi_prime0.value == doctest::Approx(1.0));
}

TEST_CASE("validate_hypotheses: tabulated dpot with dpot(0)=0.1 fails Hp2 at t=0") {
  Model m = make_cfi_model();
  std::vector<double> t{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> y{0.1, 0.2, 0.4, 0.7, 1.0};
  m.dpot = ScalarFn::tabulated(t, y, FnDomain::UnitInterval);
  const auto rep = validate_hypotheses(m, 128);
  CHECK_FALSE(rep.hp2);
  bool witness_at_zero = false;
  for (const auto& w : rep.witnesses)
    if (w.t == 0.0 && w.check.find("dpot") != std::string::npos)
      witness_at_zero = true;
  CHECK(witness_at_zero);
}

TEST_CASE("malformed tabulated data rejected") {
  std::vector<double> t{0.0, 0.5, 0.5, 1.0};
  std::vector<double> y{0.0, 0.2, 0.3, 1.0};
  CHECK_THROWS_AS(ScalarFn::tabulated(t, y, FnDomain::UnitInterval),
                  std::invalid_argument);
}

TEST_CASE("eval_f: closed-form values") {
  SUBCASE("CFI q=1 lambda=1 symmetric cancellation") {
    const Model m = make_cfi_model(1.0, 1.0);
    CHECK(eval_f(m, 0.5) == doctest::Approx(1.0));
    CHECK(eval_f(m, 0.0) == 0.0);
  }
  SUBCASE("Wu family fhat=t^2, Q=t^2") {
    const Model m = make_wu_model(2.0, 1.0, 1.0);
    CHECK(eval_f(m, 0.9) == doctest::Approx(9.0)); // sqrt(0.81/0.01)
  }
  SUBCASE("t=1 is a domain error") {
    const Model m = make_cfi_model();
    CHECK_THROWS_AS(eval_f(m, 1.0), std::domain_error);
  }
}

TEST_CASE("eval_f_eps values and identity") {
  const Model m = make_cfi_model(1.0, 1.0);
  CHECK(eval_f_eps(m, 0.3, 1.0) == 1.0);
  CHECK(eval_f_eps(m, 0.3, 0.0) == 0.0);

  // eps f^2(t) = 1  =>  f_eps = sqrt(1/2). For CFI lambda=1 q=1,
  // f(t) = t/(1-t), so eps f^2 = 1 at t = 1/(1+sqrt(eps)).
  const double eps = 0.25;
  const double t = 1.0 / (1.0 + std::sqrt(eps));
  CHECK(eps * eval_f_squared(m, t) == doctest::Approx(1.0));
  CHECK(eval_f_eps(m, eps, t) == doctest::Approx(std::sqrt(0.5)));

  // identity f_eps^2 (eps fhat + Q(1-t)) = eps fhat, relative 1e-12
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ut(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const double tt = ut(rng);
    const double ee = 0.001 + ut(rng);
    const double fe = eval_f_eps(m, ee, tt);
    const double lhs = fe * fe * (ee * m.fhat(tt) + m.Q(1.0 - tt));
    const double rhs = ee * m.fhat(tt);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("eval_f_tilde_eps") {
  const Model m = make_cfi_model(1.0, 1.0);
  CHECK(eval_f_tilde_eps(m, 0.5, 1.0) == 1.0);
  CHECK(eval_f_tilde_eps(m, 0.5, 0.0) == 0.0);
  // eps = 0.01 and f(t) = 5: 1 ∧ 0.5 = 0.5; f=5 at t = 5/6 for CFI.
  const double t = 5.0 / 6.0;
  CHECK(eval_f(m, t) == doctest::Approx(5.0));
  CHECK(eval_f_tilde_eps(m, 0.01, t) == doctest::Approx(0.5));
}

TEST_CASE("f_eps and f~_eps non-decreasing near 0 for validated models") {
  const Model m = make_wu_model(2.0, 0.7, 1.0);
  REQUIRE(validate_hypotheses(m).all_pass());
  for (double eps : {0.01, 0.1, 1.0}) {
    double prev1 = -1.0, prev2 = -1.0;
    for (int i = 0; i <= 64; ++i) {
      const double t = 0.1 * i / 64.0;
      const double a = eval_f_eps(m, eps, t);
      const double b = eval_f_tilde_eps(m, eps, t);
      CHECK(a >= prev1 - 1e-13);
      CHECK(b >= prev2 - 1e-13);
      prev1 = a;
      prev2 = b;
    }
  }
}

TEST_CASE("sigma_bar closed forms") {
  SUBCASE("CFI q=1 lambda=0.7 -> finite 0.7") {
    const auto sb = sigma_bar(make_cfi_model(0.7, 1.0));
    CHECK(sb.kind == SigmaKind::Finite);
    CHECK(sb.value == doctest::Approx(0.7));
  }
  SUBCASE("q=2 -> infinite") {
    CHECK(sigma_bar(make_cfi_model(0.7, 2.0)).kind == SigmaKind::Infinite);
  }
  SUBCASE("dpot = Q -> finite 1") {
    Model m = make_cfi_model();
    m.Q = ScalarFn::quadratic();
    m.dpot = ScalarFn::quadratic();
    const auto sb = sigma_bar(m);
    CHECK(sb.kind == SigmaKind::Finite);
    CHECK(sb.value == doctest::Approx(1.0));
  }
}

TEST_CASE("sigma_bar on tabulated data classifies and extrapolates") {
  Model m = make_cfi_model(1.0, 1.0);
  // tabulated dpot ~ t^2 on a log grid reaching close to 0
  m.dpot = tabulate(ScalarFn::quadratic(), 1e-13, 1.0, 400,
                    FnDomain::UnitInterval, 1.0, true);
  const auto sb = sigma_bar(m);
  CHECK(sb.kind == SigmaKind::Finite);
  CHECK(sb.value == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(sb.residual < 1e-2);
}

TEST_CASE("sigma_bar 1-homogeneous in sqrt(dpot)") {
  // replacing dpot by c^2 dpot multiplies finite sigma_bar by c
  for (double c : {0.5, 2.0, 3.0}) {
    Model m = make_cfi_model(1.0, 1.0);
    // c^2 t^2 = scaled_power with lambda = 1/c, q = 1
    m.dpot = ScalarFn::scaled_power(1.0 / c, 1.0);
    const auto sb = sigma_bar(m);
    CHECK(sb.kind == SigmaKind::Finite);
    CHECK(sb.value == doctest::Approx(c));
  }
}

TEST_CASE("psi analytic values") {
  SUBCASE("dpot = t^2: Psi(t) = t - t^2/2") {
    const Model m = make_cfi_model();
    CHECK(psi(m, 1.0) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(psi(m, 0.25) == doctest::Approx(0.25 - 0.03125).epsilon(1e-10));
    CHECK(psi(m, 0.0) == 0.0);
  }
  SUBCASE("dpot = t: Psi(1) = 2/3") {
    Model m = make_cfi_model();
    m.dpot = ScalarFn::power(1.0);
    CHECK(psi(m, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  }
  SUBCASE("monotone in t") {
    Model m = make_wu_model();
    double prev = 0.0;
    for (int i = 1; i <= 20; ++i) {
      const double v = psi(m, i / 20.0);
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("phi limits: built-ins and tabulated scaling oracle") {
  Model m = make_cfi_model();
  CHECK(phi_prime0(m) == 1.0);
  CHECK(phi_inf(m) == 1.0);
  m.phi = ScalarFn::rational();
  CHECK(phi_prime0(m) == 1.0);
  CHECK(phi_inf(m) == 1.0);

  // c * t/(1+t) tabulated with c=3: both limits scale by c.
  Model base = make_cfi_model();
  base.phi = tabulate(ScalarFn::rational(), 1e-10, 1e4, 3000,
                      FnDomain::NonnegHalfline, 1.0, true);
  Model scaled = base;
  scaled.phi = tabulate(ScalarFn::rational(), 1e-10, 1e4, 3000,
                        FnDomain::NonnegHalfline, 3.0, true);
  const double c = 3.0;
  CHECK(phi_prime0(scaled) == doctest::Approx(c * phi_prime0(base)).epsilon(1e-9));
  CHECK(phi_inf(scaled) == doctest::Approx(c * phi_inf(base)).epsilon(1e-9));
  CHECK(phi_inf(scaled) == doctest::Approx(3.0).epsilon(1e-2));
  CHECK(phi_prime0(scaled) == doctest::Approx(3.0).epsilon(1e-2));
}

TEST_CASE("fhat(1)=1 required within 1e-12 for tabulated claims") {
  Model m = make_cfi_model();
  std::vector<double> t{0.0, 0.5, 1.0};
  std::vector<double> y{0.0, 0.25, 1.0 + 1e-6};
  m.fhat = ScalarFn::tabulated(t, y, FnDomain::UnitInterval);
  const auto rep = validate_hypotheses(m, 128);
  CHECK_FALSE(rep.hp1);
}

TEST_CASE("CSV round trip for tabulated functions") {
  const std::string path = "./tab_test.csv";
  {
    std::vector<std::vector<double>> cols{{0.0, 0.5, 1.0}, {0.0, 0.25, 1.0}};
    write_csv(path, {"t", "value"}, cols);
  }
  const auto f = ScalarFn::tabulated_from_csv(path, FnDomain::UnitInterval);
  CHECK(f(0.5) == doctest::Approx(0.25));
  CHECK(f(1.0) == doctest::Approx(1.0));
  std::remove(path.c_str());
}
