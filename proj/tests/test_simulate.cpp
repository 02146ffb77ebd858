#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "ctax/audit.hpp"
#include "ctax/simulate.hpp"

using namespace ctax;

namespace {

struct Lab {
  Calibration p = build_calibration("baseline");
  Scenario sc;
  SteadyState ss;
  PolicySolution pol;
  explicit Lab(Scenario s, int order = 2)
      : sc(s), ss(solve_steady_state(s, p)), pol(solve_policy(s, p, ss, order)) {}
};

}  // namespace

TEST_CASE("fixed seed reproduces the path bit for bit") {
  Lab lab(Scenario::bau());
  auto a = simulate_pruned(lab.sc, lab.p, lab.pol, 500, 100, 42);
  auto b = simulate_pruned(lab.sc, lab.p, lab.pol, 500, 100, 42);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  auto c = simulate_pruned(lab.sc, lab.p, lab.pol, 500, 100, 43);
  CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("log TFP inherits the exact AR(1) dispersion") {
  Lab lab(Scenario::bau());
  auto paths = simulate_pruned(lab.sc, lab.p, lab.pol, 200000, 2000, 7);
  Eigen::ArrayXd aa = paths.row(var::a).array();
  const double mean = aa.mean();
  const double sd = std::sqrt((aa - mean).square().mean());
  const double target =
      lab.p.sigma_eta / std::sqrt(1.0 - lab.p.rho_A * lab.p.rho_A);
  CHECK(sd == doctest::Approx(target).epsilon(0.02));
  // sample-mean dispersion of an AR(1): sigma_x * sqrt((1+rho)/(1-rho)/T)
  const double se =
      target * std::sqrt((1.0 + lab.p.rho_A) / (1.0 - lab.p.rho_A) / 200000.0);
  CHECK(std::abs(mean) < 4.0 * se);
}

TEST_CASE("first-order policy leaves the second-order register at zero") {
  Lab lab(Scenario::unconstrained(), 1);
  PrunedState s = pruned_init(lab.pol);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n01;
  for (int t = 0; t < 200; ++t)
    pruned_step(lab.pol, s, lab.p.sigma_eta * n01(rng));
  CHECK(s.xs.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.xf.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("stochastic steady state shows precautionary capital") {
  Lab lab(Scenario::bau());
  Eigen::VectorXd z = stochastic_steady_state(lab.sc, lab.p, lab.pol);
  CHECK(z(var::K) > lab.ss[var::K]);
  CHECK(z(var::K) == doctest::Approx(8.4723).epsilon(2e-3));
  // the rest point is a fixed point of the deterministic pruned update
  PrunedState rest = stochastic_rest_registers(lab.pol);
  PrunedState next = rest;
  pruned_step(lab.pol, next, 0.0);
  CHECK((next.xf - rest.xf).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((next.xs - rest.xs).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("observation map enforces fiscal identities exactly") {
  for (Scenario sc : {Scenario::bau(), Scenario::unconstrained(),
                      Scenario::constrained(0.0), Scenario::constrained(1.0)}) {
    CAPTURE(sc.name());
    Lab lab(sc);
    auto paths = simulate_pruned(lab.sc, lab.p, lab.pol, 2000, 200, 99);
    for (int t = 0; t < paths.cols(); t += 97) {
      const auto z = paths.col(t);
      CHECK(std::abs(z(var::tau) * z(var::E) - z(var::T)) < 1e-12);
      CHECK(std::abs(lab.p.gamma * z(var::TH) +
                     (1.0 - lab.p.gamma) * z(var::TS) - z(var::T)) < 1e-12);
    }
  }
}

TEST_CASE("identity audit passes along simulated paths") {
  for (Scenario sc : {Scenario::bau(), Scenario::unconstrained(),
                      Scenario::constrained(0.2)}) {
    CAPTURE(sc.name());
    Lab lab(sc);
    auto paths = simulate_pruned(lab.sc, lab.p, lab.pol, 5000, 500, 11);
    AuditReport rep = identity_audit(lab.sc, lab.p, paths);
    for (const auto& e : rep.entries) {
      CAPTURE(e.name);
      CHECK(e.pass);
    }
    CHECK(rep.pass());
  }
}

TEST_CASE("moments: deterministic BAU tax reports a hard zero dispersion") {
  Lab lab(Scenario::bau());
  auto paths = simulate_pruned(lab.sc, lab.p, lab.pol, 20000, 1000, 3);
  SimulationReport rep =
      moments(lab.sc, paths, stochastic_steady_state(lab.sc, lab.p, lab.pol));
  CHECK(rep.log_std_pct(var::tau) == 0.0);
  CHECK(rep.mean(var::tau) == 0.0);
  CHECK(rep.log_std_pct(var::Y) > 0.0);
  // batch standard errors shrink with the sample and stay positive
  CHECK(rep.mean_se(var::Y) > 0.0);
  CHECK(rep.mean_se(var::Y) < 0.01 * rep.mean(var::Y));
}

TEST_CASE("moments: unconstrained lambda^H is structurally zero") {
  Lab lab(Scenario::unconstrained());
  auto paths = simulate_pruned(lab.sc, lab.p, lab.pol, 20000, 1000, 5);
  SimulationReport rep =
      moments(lab.sc, paths, stochastic_steady_state(lab.sc, lab.p, lab.pol));
  CHECK(rep.log_std_pct(var::lamH) == 0.0);
  CHECK(std::abs(rep.mean(var::lamH)) < 1e-10);
}

TEST_CASE("impulse responses: procyclical real block at impact") {
  Lab lab(Scenario::constrained(0.2));
  IrfSet r = irf(lab.sc, lab.p, lab.pol, 1.0, 40);
  CHECK(r.dev(0, var::Y) > 0.0);
  CHECK(r.dev(0, var::C) > 0.0);
  CHECK(r.dev(0, var::I) > 0.0);
  CHECK(r.dev(0, var::E) > 0.0);
  // responses decay back toward the stochastic rest point
  CHECK(std::abs(r.dev(40, var::Y)) < std::abs(r.dev(0, var::Y)));
  // scaling: a half-size shock roughly halves the impact response
  IrfSet h = irf(lab.sc, lab.p, lab.pol, 0.5, 40);
  CHECK(h.dev(0, var::Y) ==
        doctest::Approx(0.5 * r.dev(0, var::Y)).epsilon(0.02));
}

TEST_CASE("generalized IRF agrees with the deterministic IRF to first order") {
  Lab lab(Scenario::bau());
  IrfSet det = irf(lab.sc, lab.p, lab.pol, 1.0, 20);
  IrfSet g = girf(lab.sc, lab.p, lab.pol, 1.0, 20, 400, 1234);
  for (int hzn : {0, 5, 10}) {
    CHECK(g.dev(hzn, var::Y) ==
          doctest::Approx(det.dev(hzn, var::Y)).epsilon(0.15).scale(0.01));
  }
}

TEST_CASE("utility-domain violations surface as a solver error") {
  Lab lab(Scenario::bau());
  PolicySolution wild = lab.pol;
  wild.sigma_eta = 0.5;  // innovations large enough to breach the floor
  CHECK_THROWS_AS(simulate_pruned(lab.sc, lab.p, wild, 5000, 0, 17),
                  solver_error);
}
