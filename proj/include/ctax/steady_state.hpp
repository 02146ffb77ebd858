#pragma once

// Deterministic steady states per scenario: closed-form chain for BAU,
// damped Newton on the full residual system for the planner regimes (the
// lambda^H <-> tau fixed point has no closed form).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "ctax/calibration.hpp"
#include "ctax/model.hpp"

namespace ctax {

struct SteadyState {
  Scenario scenario;
  Calibration calib;
  std::vector<double> z;  // one value per layout slot
  int iterations{0};
  double residual_norm{0.0};

  double operator[](int idx) const { return z[idx]; }
};

inline double max_abs_residual(const Scenario& sc, const Calibration& p,
                               const std::vector<double>& z) {
  auto r = residuals<double>(sc, p, z, z, 0.0);
  double m = 0.0;
  for (double v : r) m = std::max(m, std::abs(v));
  return m;
}

namespace detail {

// Fill the recursion/diagnostic slots implied by the real allocation.
inline void fill_auxiliary(const Scenario& sc, const Calibration& p,
                           std::vector<double>& z) {
  using namespace var;
  const double surpH = z[CH] - p.chi * z[X];
  const double surpS = z[CS] - p.chi * z[X];
  if (surpH <= 0.0 || surpS <= 0.0)
    throw std::domain_error("steady state: non-positive surplus consumption");
  z[lam] = std::pow(surpS, -p.sigma);
  z[lamH] = p.gamma * (std::pow(surpH, -p.sigma) - z[lam]) / z[lam];
  z[UH] = felicity(surpH, p) / (1.0 - p.beta);
  z[US] = felicity(surpS, p) / (1.0 - p.beta);
  z[Wel] = p.gamma * z[UH] + (1.0 - p.gamma) * z[US];
  z[Pb] = p.beta;
  z[Ps] = p.beta * z[D] / (1.0 - p.beta);
  const double bq = p.beta * p.eta_pollution;
  if (sc.regime == Regime::UnconstrainedPlanner)
    z[VX] = p.beta * p.chi / (1.0 - bq);
  else
    z[VX] = p.beta * p.chi * (1.0 + z[lamH]) / (1.0 - bq);
}

// Jacobian of the steady-state map z -> residuals(z, z, 0) by seeding both
// dual channels of every input with the same direction.
inline Eigen::MatrixXd ss_jacobian(const Scenario& sc, const Calibration& p,
                                   const std::vector<double>& z) {
  const int n = kNumVars;
  Eigen::MatrixXd J(n, n);
  std::vector<HyperDual> zd(n), out(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) zd[i] = HyperDual(z[i], i == j, 0.0, 0.0);
    residuals<HyperDual>(sc, p, std::span<const HyperDual>(zd),
                         std::span<const HyperDual>(zd), HyperDual(0.0),
                         std::span<HyperDual>(out));
    for (int i = 0; i < n; ++i) J(i, j) = out[i].d1;
  }
  return J;
}

inline SteadyState newton_polish(const Scenario& sc, const Calibration& p,
                                 std::vector<double> z, double tol = 1e-12,
                                 int max_iter = 200) {
  const int n = kNumVars;
  SteadyState ss{sc, p, z, 0, 0.0};
  auto norm_at = [&](const std::vector<double>& zz) -> double {
    auto r = residuals<double>(sc, p, zz, zz, 0.0);
    double m = 0.0;
    for (double v : r) m = std::max(m, std::abs(v));
    return m;
  };
  double fnorm = norm_at(z);
  for (int it = 0; it < max_iter && fnorm > tol; ++it) {
    auto r = residuals<double>(sc, p, z, z, 0.0);
    Eigen::VectorXd rv = Eigen::Map<Eigen::VectorXd>(r.data(), n);
    Eigen::MatrixXd J = ss_jacobian(sc, p, z);
    Eigen::VectorXd step = J.fullPivLu().solve(-rv);
    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k < 40; ++k, lambda *= 0.5) {
      std::vector<double> trial(n);
      for (int i = 0; i < n; ++i) trial[i] = z[i] + lambda * step[i];
      try {
        double tnorm = norm_at(trial);
        if (tnorm < fnorm || tnorm <= tol) {
          z = trial;
          fnorm = tnorm;
          accepted = true;
          break;
        }
      } catch (const std::domain_error&) {
        // damped step wandered outside the admissible region; halve again
      }
    }
    ss.iterations = it + 1;
    if (!accepted)
      throw solver_error("steady state: Newton damping floor reached, residual " +
                         std::to_string(fnorm));
  }
  if (fnorm > tol)
    throw solver_error("steady state: Newton did not converge, residual " +
                       std::to_string(fnorm));
  ss.z = z;
  ss.residual_norm = fnorm;
  return ss;
}

// Real-allocation block for a given (tau, lambda^H) guess; used to warm-start
// the full Newton solve. Iterates the scalar fixed point tau <-> lambda^H.
inline std::vector<double> warm_start(const Scenario& sc, const Calibration& p) {
  using namespace var;
  const double bq = p.beta * p.eta_pollution;
  double lamh = 0.0;
  double Ygs = 1.0;
  std::vector<double> z(kNumVars, 0.0);
  for (int it = 0; it < 500; ++it) {
    double tau_rate;
    if (sc.regime == Regime::UnconstrainedPlanner)
      tau_rate = p.beta * p.chi / (1.0 - bq);
    else
      tau_rate = p.beta * p.chi * (1.0 + lamh) /
                 ((1.0 - bq) * (1.0 + (sc.xi / std::max(p.gamma, 1e-12)) * lamh));
    double mu_s = std::pow(
        std::clamp(tau_rate * p.phi1 * std::pow(Ygs, -p.phi2) /
                       (p.theta1 * p.theta2),
                   0.0, 1.0),
        1.0 / (p.theta2 - 1.0));
    double f = p.theta1 * std::pow(mu_s, p.theta2);
    double E_over_Y = (1.0 - mu_s) * p.phi1 * std::pow(Ygs, -p.phi2);
    double rho_mc = 1.0 - f - tau_rate * (1.0 - p.phi2) * E_over_Y;
    double KY = p.alpha * rho_mc / (1.0 / p.beta - 1.0 + p.delta);
    double Ynew = std::pow(p.A * std::pow(KY, p.alpha), 1.0 / (1.0 - p.alpha));
    double K_ = KY * Ynew;
    double E_ = (1.0 - mu_s) * p.phi1 * std::pow(Ynew, 1.0 - p.phi2);
    double X_ = E_ / (1.0 - p.eta_pollution);
    double C_ = Ynew - p.delta * K_ - f * Ynew;
    double W_ = (1.0 - p.alpha) * rho_mc * Ynew;
    double CH_, CS_, lamh_new = 0.0;
    if (sc.regime == Regime::UnconstrainedPlanner) {
      CH_ = CS_ = C_;
    } else {
      double TH_ = (sc.regime == Regime::ConstrainedPlanner)
                       ? (sc.xi / p.gamma) * tau_rate * E_
                       : 0.0;
      CH_ = W_ + TH_;
      CS_ = (C_ - p.gamma * CH_) / (1.0 - p.gamma);
      double sH = CH_ - p.chi * X_, sS = CS_ - p.chi * X_;
      if (sH <= 0.0 || sS <= 0.0)
        throw std::domain_error("steady state warm start: negative surplus");
      lamh_new = p.gamma * (std::pow(sH / sS, -p.sigma) - 1.0);
    }
    double gap = std::abs(lamh_new - lamh) + std::abs(Ynew - Ygs);
    lamh = 0.5 * lamh + 0.5 * lamh_new;
    Ygs = Ynew;
    z[K] = K_; z[X] = X_; z[a] = 0.0;
    z[Y] = Ynew; z[C] = C_; z[CH] = CH_; z[CS] = CS_;
    z[I] = p.delta * K_; z[W] = W_;
    z[D] = Ynew - W_ - z[I] - f * Ynew - tau_rate * E_;
    z[E] = E_; z[mu] = mu_s; z[tau] = tau_rate;
    z[VE] = tau_rate; z[Q] = 1.0; z[rho] = rho_mc;
    z[T] = tau_rate * E_;
    if (sc.regime == Regime::BAU) {
      z[TH] = z[TS] = z[T] = 0.0;
    } else if (sc.regime == Regime::UnconstrainedPlanner) {
      z[TH] = tau_rate * E_ + z[D];
      z[TS] = tau_rate * E_ - p.gamma / (1.0 - p.gamma) * z[D];
    } else {
      z[TH] = (sc.xi / p.gamma) * tau_rate * E_;
      z[TS] = ((1.0 - sc.xi) / (1.0 - p.gamma)) * tau_rate * E_;
    }
    if (gap < 1e-13 && it > 3) break;
  }
  fill_auxiliary(sc, p, z);
  return z;
}

}  // namespace detail

// Closed-form chain: rho=1, Y/K pinned by the capital Euler, A normalized so
// that Y = 1, mu = tau = 0.
inline SteadyState solve_ss_bau(const Calibration& p) {
  using namespace var;
  Scenario sc = Scenario::bau();
  std::vector<double> z(kNumVars, 0.0);
  const double K_ = p.k_bau();
  z[K] = K_; z[X] = p.phi1 / (1.0 - p.eta_pollution); z[a] = 0.0;
  z[Y] = 1.0;
  z[I] = p.delta * K_;
  z[C] = 1.0 - z[I];
  z[W] = (1.0 - p.alpha);
  z[CH] = z[W];  // wage times unit labor, zero transfers
  z[CS] = (z[C] - p.gamma * z[CH]) / (1.0 - p.gamma);
  z[E] = p.phi1;  // Y = 1
  z[mu] = 0.0; z[tau] = 0.0; z[VE] = 0.0;
  z[Q] = 1.0; z[rho] = 1.0;
  z[D] = z[Y] - z[W] - z[I];
  z[T] = z[TH] = z[TS] = 0.0;
  detail::fill_auxiliary(sc, p, z);
  SteadyState ss{sc, p, z, 0, max_abs_residual(sc, p, z)};
  if (ss.residual_norm > 1e-10)
    throw solver_error("BAU closed form failed certification");
  return ss;
}

inline SteadyState solve_ss_unconstrained(const Calibration& p) {
  Scenario sc = Scenario::unconstrained();
  auto z0 = detail::warm_start(sc, p);
  return detail::newton_polish(sc, p, z0);
}

inline SteadyState solve_ss_constrained(const Calibration& p, double xi) {
  Scenario sc = Scenario::constrained(xi);
  auto z0 = detail::warm_start(sc, p);
  return detail::newton_polish(sc, p, z0);
}

inline SteadyState solve_steady_state(const Scenario& sc, const Calibration& p) {
  switch (sc.regime) {
    case Regime::BAU: return solve_ss_bau(p);
    case Regime::UnconstrainedPlanner: return solve_ss_unconstrained(p);
    case Regime::ConstrainedPlanner: return solve_ss_constrained(p, sc.xi);
  }
  throw validation_error("unknown scenario");
}

}  // namespace ctax
