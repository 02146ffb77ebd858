#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ctax/calibration.hpp"

using namespace ctax;

TEST_CASE("baseline preset carries the published calibration") {
  Calibration p = build_calibration("baseline");
  CHECK(p.gamma == 0.20);
  CHECK(p.beta == 0.98267);
  CHECK(p.sigma == 4.199);
  CHECK(p.chi == 4e-4);
  CHECK(p.alpha == 0.36);
  CHECK(p.delta == 0.025);
  CHECK(p.rho_A == 0.95);
  CHECK(p.sigma_eta == 0.007);
  CHECK(p.eta_pollution == 0.9979);
  CHECK(p.theta2 == 2.8);
  CHECK(p.phi2 == 0.304);
}

TEST_CASE("derived constants anchor the normalization") {
  Calibration p = build_calibration("baseline");
  // K chosen so the BAU rental rate satisfies the Euler equation
  const double K = p.alpha / (1.0 / p.beta - 1.0 + p.delta);
  CHECK(p.k_bau() == doctest::Approx(K).epsilon(1e-15));
  // A scales production so Y = 1 at the BAU steady state
  CHECK(p.A * std::pow(K, p.alpha) == doctest::Approx(1.0).epsilon(1e-14));
  // adjustment cost anchored at Phi(delta) = delta, Phi'(delta) = 1
  auto [phi, phip] = adjustment_cost(p.delta, p);
  CHECK(phi == doctest::Approx(p.delta).epsilon(1e-14));
  CHECK(phip == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("adjustment cost is exactly linear when eps_adj = 0") {
  Calibration p = build_calibration("baseline");
  REQUIRE(p.eps_adj == 0.0);
  for (double x : {0.01, 0.025, 0.08}) {
    auto [phi, phip] = adjustment_cost(x, p);
    CHECK(phi == x);
    CHECK(phip == 1.0);
  }
}

TEST_CASE("concave adjustment cost under the eps_high preset") {
  Calibration p = build_calibration("eps_high");
  CHECK(p.eps_adj == 1.5);
  auto [phi, phip] = adjustment_cost(p.delta, p);
  CHECK(phi == doctest::Approx(p.delta).epsilon(1e-12));
  CHECK(phip == doctest::Approx(1.0).epsilon(1e-12));
  // curvature: marginal installation falls as i/k rises
  auto [phi2, phip2] = adjustment_cost(2.0 * p.delta, p);
  CHECK(phip2 < 1.0);
  CHECK(phi2 < 2.0 * p.delta);
}

TEST_CASE("named presets apply their single deviation") {
  CHECK(build_calibration("gamma_low").gamma == doctest::Approx(0.11));
  CHECK(build_calibration("gamma_high").gamma == doctest::Approx(0.33));
  CHECK(build_calibration("theta1_high").theta1 ==
        doctest::Approx(3.5 * 0.05607));
  CHECK(build_calibration("sigma_low").sigma == doctest::Approx(2.0));
  CHECK(build_calibration("chi_high").chi > 4e-4);
  CHECK(build_calibration("eps_high").eps_adj == doctest::Approx(1.5));
  CHECK_THROWS_AS(build_calibration("no_such_preset"), validation_error);
}

TEST_CASE("overrides replace fields and recompute derived constants") {
  Calibration base = build_calibration("baseline");
  Calibration p = build_calibration("baseline", {{"beta", 0.99}, {"gamma", 0.3}});
  CHECK(p.beta == 0.99);
  CHECK(p.gamma == 0.3);
  CHECK(p.k_bau() > base.k_bau());
  CHECK(p.A < base.A);  // more capital, stronger normalization
  CHECK_THROWS_AS(build_calibration("baseline", {{"nonsense", 1.0}}),
                  validation_error);
}

TEST_CASE("validate rejects out-of-range parameters") {
  auto broken = [](auto&& tweak) {
    Calibration p = build_calibration("baseline");
    tweak(p);
    p.recompute_derived();
    return p;
  };
  CHECK_THROWS_AS(broken([](Calibration& p) { p.beta = 1.01; }).validate(),
                  validation_error);
  CHECK_THROWS_AS(broken([](Calibration& p) { p.gamma = 1.0; }).validate(),
                  validation_error);
  CHECK_THROWS_AS(broken([](Calibration& p) { p.delta = -0.1; }).validate(),
                  validation_error);
  CHECK_THROWS_AS(
      broken([](Calibration& p) { p.eta_pollution = 1.0; }).validate(),
      validation_error);
  CHECK_NOTHROW(build_calibration("baseline").validate());
}

TEST_CASE("externality sharpens effective risk aversion") {
  Calibration p = build_calibration("baseline");
  const double X = p.phi1 / (1.0 - p.eta_pollution);
  const double Inv = p.delta * p.k_bau();
  const double CH = 1.0 - p.alpha;  // wage income, unit labor, no transfers
  const double CS = (1.0 - Inv - p.gamma * CH) / (1.0 - p.gamma);
  const double rra_s = effective_rra(CS, X, p);
  const double rra_h = effective_rra(CH, X, p);
  // subsistence-like floor chi*X pushes curvature above sigma, more so for
  // the poorer hand-to-mouth household
  CHECK(rra_s > p.sigma);
  CHECK(rra_h > rra_s);
  CHECK(rra_s == doctest::Approx(5.46).epsilon(0.01));
  CHECK(rra_h == doctest::Approx(5.98).epsilon(0.01));
  CHECK_THROWS_AS(effective_rra(p.chi * X, X, p), std::domain_error);
}

TEST_CASE("closed-form steady-state carbon price") {
  Calibration p = build_calibration("baseline");
  const double tau = ss_scc(0.0, p);
  CHECK(tau == doctest::Approx(p.beta * p.chi /
                               (1.0 - p.beta * p.eta_pollution))
                   .epsilon(1e-14));
  CHECK(tau == doctest::Approx(0.020268).epsilon(1e-4));
  // redistribution motive scales the price linearly
  CHECK(ss_scc(0.5, p) == doctest::Approx(1.5 * tau).epsilon(1e-14));
  CHECK_THROWS_AS(ss_scc(-0.1, p), std::domain_error);
}

TEST_CASE("abatement cost function") {
  Calibration p = build_calibration("baseline");
  auto [f0, fp0] = abatement_cost(0.0, p);
  CHECK(f0 == 0.0);
  CHECK(fp0 == 0.0);
  auto [f1, fp1] = abatement_cost(1.0, p);
  CHECK(f1 == doctest::Approx(p.theta1).epsilon(1e-14));
  CHECK(fp1 == doctest::Approx(p.theta1 * p.theta2).epsilon(1e-14));
  CHECK_THROWS_AS(abatement_cost(-0.01, p), std::domain_error);
  CHECK_THROWS_AS(abatement_cost(1.01, p), std::domain_error);
}
