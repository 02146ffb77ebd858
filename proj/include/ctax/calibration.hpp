#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace ctax {

struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct solver_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Structural parameters plus the derived constants (A, b1, b2) that anchor
// the BAU steady state. Quarterly calibration.
struct Calibration {
  double gamma{0.20};         // HtM population share
  double beta{0.98267};       // discount factor
  double sigma{4.199};        // local utility curvature
  double chi{4e-4};           // externality weight in utility
  double alpha{0.36};         // capital share
  double delta{0.025};        // depreciation rate
  double eps_adj{0.0};        // capital-adjustment elasticity
  double rho_A{0.95};         // TFP persistence
  double sigma_eta{0.007};    // TFP innovation s.d.
  double eta_pollution{0.9979};  // GHG continuation rate
  double theta1{0.05607};     // abatement cost level
  double theta2{2.8};         // abatement cost curvature
  double phi1{1.0};           // carbon intensity level
  double phi2{0.304};         // one minus elasticity of emissions to output
  double xi{0.20};            // transfer share to HtM (default: uniform)
  double N{1.0};              // aggregate labor endowment

  // derived
  double A{0.0};   // TFP shifter, anchored to Y=1 at the BAU steady state
  double b1{1.0};  // adjustment-cost constants, anchored so Phi(delta)=delta,
  double b2{0.0};  // Phi'(delta)=1

  // Capital stock at the BAU deterministic steady state (Y normalized to 1).
  double k_bau() const { return alpha / (1.0 / beta - 1.0 + delta); }

  void recompute_derived() {
    b1 = std::pow(delta, eps_adj);
    b2 = (eps_adj == 0.0) ? 0.0 : -delta * eps_adj / (1.0 - eps_adj);
    A = std::pow(std::pow(N, 1.0 - alpha) * std::pow(k_bau(), alpha), -1.0);
  }

  void validate() const {
    auto check = [](bool ok, const char* field, const char* cond) {
      if (!ok)
        throw validation_error(std::string("calibration: parameter '") + field +
                               "' violates " + cond);
    };
    check(gamma >= 0.0 && gamma < 1.0, "gamma", "0 <= gamma < 1");
    check(beta > 0.0 && beta < 1.0, "beta", "0 < beta < 1");
    check(eta_pollution > 0.0 && eta_pollution < 1.0, "eta", "0 < eta < 1");
    check(theta2 > 1.0, "theta2", "theta2 > 1");
    check(xi >= 0.0 && xi <= 1.0, "xi", "0 <= xi <= 1");
    check(delta > 0.0 && delta < 1.0, "delta", "0 < delta < 1");
    check(alpha > 0.0 && alpha < 1.0, "alpha", "0 < alpha < 1");
    check(sigma > 0.0, "sigma", "sigma > 0");
    check(chi >= 0.0, "chi", "chi >= 0");
    check(theta1 >= 0.0, "theta1", "theta1 >= 0");
    check(sigma_eta >= 0.0, "sigma_eta", "sigma_eta >= 0");
    check(eps_adj != 1.0, "eps_adj", "eps_adj != 1 (formula degenerates)");
  }
};

using Overrides = std::map<std::string, double>;

inline bool known_parameter(const std::string& name) {
  for (const char* k : {"gamma", "beta", "sigma", "chi", "alpha", "delta",
                        "eps_adj", "rho_A", "sigma_eta", "eta", "theta1",
                        "theta2", "phi1", "phi2", "xi"})
    if (name == k) return true;
  return false;
}

inline Calibration build_calibration(const std::string& preset,
                                     const Overrides& overrides = {}) {
  Calibration c;  // baseline defaults
  if (preset == "baseline") {
  } else if (preset == "gamma_low") {
    c.gamma = 0.11;
  } else if (preset == "gamma_high") {
    c.gamma = 0.33;
  } else if (preset == "theta1_high") {
    c.theta1 = 0.05607 * 3.5;
  } else if (preset == "sigma_low") {
    c.sigma = 2.0;
  } else if (preset == "chi_high") {
    c.chi = 8.7360e-4;
  } else if (preset == "eps_high") {
    c.eps_adj = 1.5;
  } else {
    throw validation_error("unknown preset '" + preset + "'");
  }

  for (const auto& [name, val] : overrides) {
    if (name == "gamma") c.gamma = val;
    else if (name == "beta") c.beta = val;
    else if (name == "sigma") c.sigma = val;
    else if (name == "chi") c.chi = val;
    else if (name == "alpha") c.alpha = val;
    else if (name == "delta") c.delta = val;
    else if (name == "eps_adj") c.eps_adj = val;
    else if (name == "rho_A") c.rho_A = val;
    else if (name == "sigma_eta") c.sigma_eta = val;
    else if (name == "eta") c.eta_pollution = val;
    else if (name == "theta1") c.theta1 = val;
    else if (name == "theta2") c.theta2 = val;
    else if (name == "phi1") c.phi1 = val;
    else if (name == "phi2") c.phi2 = val;
    else if (name == "xi") c.xi = val;
    else throw validation_error("unknown parameter '" + name + "'");
  }

  c.validate();
  c.recompute_derived();
  return c;
}

// Jermann adjustment costs, Phi(i/k) and Phi'(i/k). For eps = 0 this is the
// identity (i/k, 1).
template <class S>
std::pair<S, S> adjustment_cost_t(const S& i_over_k, const Calibration& c) {
  using std::pow;
  if (c.eps_adj == 0.0) return {i_over_k, S(1.0)};
  const double e = c.eps_adj;
  S phi = c.b1 / (1.0 - e) * pow(i_over_k, 1.0 - e) + c.b2;
  S dphi = c.b1 * pow(i_over_k, -e);
  return {phi, dphi};
}

inline std::pair<double, double> adjustment_cost(double i_over_k,
                                                 const Calibration& c) {
  if (c.eps_adj == 1.0)
    throw validation_error("adjustment cost: eps = 1 unsupported");
  if (!(i_over_k > 0.0))
    throw std::domain_error("adjustment cost: i/k must be positive");
  return adjustment_cost_t<double>(i_over_k, c);
}

// Abatement cost f(mu) = theta1 * mu^theta2 and its derivative.
inline std::pair<double, double> abatement_cost(double mu, const Calibration& c) {
  if (mu < 0.0 || mu > 1.0)
    throw std::domain_error("abatement cost: mu outside [0,1]");
  const double f = c.theta1 * std::pow(mu, c.theta2);
  const double fp = c.theta1 * c.theta2 * std::pow(mu, c.theta2 - 1.0);
  return {f, fp};
}

// Steady-state effective risk aversion sigma / (1 - chi*X/C).
inline double effective_rra(double c_level, double x_stock, const Calibration& c) {
  if (c_level <= c.chi * x_stock)
    throw std::domain_error("effective_rra: c <= chi*x");
  return c.sigma / (1.0 - c.chi * x_stock / c_level);
}

// Closed-form steady-state social cost of carbon.
inline double ss_scc(double lambda_h, const Calibration& c) {
  if (c.beta * c.eta_pollution >= 1.0)
    throw std::domain_error("ss_scc: beta*eta >= 1");
  if (lambda_h < 0.0) throw std::domain_error("ss_scc: lambda_h < 0");
  return c.beta / (1.0 - c.beta * c.eta_pollution) * c.chi * (1.0 + lambda_h);
}

}  // namespace ctax
