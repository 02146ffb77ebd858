#pragma once

// Two-agent RBC economy with a GHG externality: variable layout and the
// per-scenario equilibrium residual system E_t F(z_{t+1}, z_t, u_{t+1}) = 0.
// Residuals are templated over the scalar type so the same code path serves
// plain evaluation, Newton Jacobians and the hyper-dual derivative bundle.

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctax/calibration.hpp"
#include "ctax/hyperdual.hpp"

namespace ctax {

enum class Regime { BAU, UnconstrainedPlanner, ConstrainedPlanner };

struct Scenario {
  Regime regime{Regime::BAU};
  double xi{0.0};  // transfer share to HtM; meaningful for ConstrainedPlanner

  static Scenario bau() { return {Regime::BAU, 0.0}; }
  static Scenario unconstrained() { return {Regime::UnconstrainedPlanner, 0.0}; }
  static Scenario constrained(double xi) {
    if (xi < 0.0 || xi > 1.0)
      throw validation_error("scenario: xi outside [0,1]");
    return {Regime::ConstrainedPlanner, xi};
  }

  std::string name() const {
    switch (regime) {
      case Regime::BAU: return "bau";
      case Regime::UnconstrainedPlanner: return "unconstrained";
      case Regime::ConstrainedPlanner:
        if (xi == 0.0) return "constrained_xi0";
        if (xi == 1.0) return "constrained_xi1";
        return "constrained_xigamma";
    }
    return "?";
  }
};

// Slot indices. The three predetermined states come first.
namespace var {
enum : int {
  K = 0,    // capital stock
  X = 1,    // GHG concentration
  a = 2,    // log TFP
  Y = 3,    // output
  C = 4,    // aggregate consumption
  CH = 5,   // HtM consumption
  CS = 6,   // saver consumption
  I = 7,    // investment
  W = 8,    // wage
  D = 9,    // dividends
  E = 10,   // emissions flow
  mu = 11,  // abatement share
  tau = 12, // carbon tax
  lam = 13, // marginal utility of the pricing agent (saver / planner)
  lamH = 14, // marginal-utility gap (inequality metric)
  VE = 15,  // private marginal cost of emissions
  VX = 16,  // social cost of carbon
  Q = 17,   // Tobin's q
  rho = 18, // real marginal cost
  T = 19,   // aggregate transfers
  TH = 20,  // transfer to HtM
  TS = 21,  // transfer to savers
  UH = 22,  // HtM lifetime utility
  US = 23,  // saver lifetime utility
  Wel = 24, // utilitarian welfare
  Pb = 25,  // bond price
  Ps = 26,  // stock price
  count = 27
};
}  // namespace var

constexpr int kNumStates = 3;
constexpr int kNumVars = var::count;
constexpr int kNumControls = kNumVars - kNumStates;

struct VariableLayout {
  Scenario scenario;
  int n_states{kNumStates};
  int n_vars{kNumVars};
  int n_equations{kNumVars};
  std::array<const char*, kNumVars> names{
      "K", "X", "a", "Y", "C", "C^H", "C^S", "I", "W", "D", "E",
      "mu", "tau", "lambda", "lambda^H", "V^E", "V^X", "Q", "rho", "T",
      "T^H", "T^S", "U^H", "U^S", "Welfare", "P^b", "P^s"};

  // The unconstrained planner equalizes consumption: the C^H slot is tied to
  // C^S through an identity row rather than the HtM budget.
  bool has_equalization_row() const {
    return scenario.regime == Regime::UnconstrainedPlanner;
  }
  int index(const std::string& name) const {
    for (int i = 0; i < kNumVars; ++i)
      if (name == names[i]) return i;
    throw validation_error("layout: unknown variable '" + name + "'");
  }
};

inline VariableLayout variable_layout(const Scenario& s) {
  VariableLayout l;
  l.scenario = s;
  return l;
}

// CRRA felicity over surplus consumption c - chi*X.
template <class S>
S felicity(const S& surplus, const Calibration& p) {
  using std::pow;
  return pow(surplus, 1.0 - p.sigma) / (1.0 - p.sigma);
}

// One residual per equation; steady states repeat through this with zero
// residual. Expectation terms are evaluated at the supplied z_next; the
// perturbation engine owns E_t.
template <class S>
void residuals(const Scenario& sc, const Calibration& p,
               std::span<const S> zc, std::span<const S> zn, const S& shock,
               std::span<S> out) {
  using std::exp;
  using std::pow;
  using namespace var;
  if (zc.size() != kNumVars || zn.size() != kNumVars || out.size() != kNumVars)
    throw validation_error("residuals: vector size mismatch");

  const double g = p.gamma;
  const double chi = p.chi;
  const double sig = p.sigma;

  auto surplus = [&](const S& c, const S& x, const char* who) {
    S s = c - chi * x;
    if (!(value(s) > 0.0))
      throw std::domain_error(std::string("residuals: non-positive surplus consumption for ") + who);
    return s;
  };
  if (value(zc[mu]) < -1e-12 || value(zc[mu]) > 1.0 + 1e-12)
    throw std::domain_error("residuals: mu outside [0,1]");

  const S surpH = surplus(zc[CH], zc[X], "HtM");
  const S surpS = surplus(zc[CS], zc[X], "saver");
  const S surpHn = surplus(zn[CH], zn[X], "HtM (t+1)");
  const S surpSn = surplus(zn[CS], zn[X], "saver (t+1)");
  (void)surpHn;
  (void)surpSn;

  // clamp roundoff-negative abatement (the BAU corner solution mu = 0)
  S mu_c = zc[mu];
  if (value(mu_c) < 0.0) mu_c = mu_c - value(mu_c);
  const S f_mu = p.theta1 * pow(mu_c, p.theta2);
  const S sdf = p.beta * zn[lam] / zc[lam];  // pricing-agent SDF

  // -- Laws of motion (predetermined states) --
  out[K] = zn[K] - (1.0 - p.delta) * zc[K] -
           adjustment_cost_t<S>(zc[I] / zc[K], p).first * zc[K];
  out[X] = zn[X] - p.eta_pollution * zc[X] - zc[E];
  out[a] = zn[a] - p.rho_A * zc[a] - shock;

  // -- Technology, emissions, accounting --
  out[Y] = zc[Y] - exp(zc[a]) * p.A * pow(zc[K], p.alpha) * pow(p.N, 1.0 - p.alpha);
  out[E] = zc[E] - (1.0 - zc[mu]) * p.phi1 * pow(zc[Y], 1.0 - p.phi2);
  out[D] = zc[D] - (zc[Y] - zc[W] * p.N - zc[I] - f_mu * zc[Y] - zc[tau] * zc[E]);
  out[C] = zc[C] - g * zc[CH] - (1.0 - g) * zc[CS];
  out[I] = zc[Y] - zc[C] - zc[I] - f_mu * zc[Y];  // resource constraint
  out[T] = zc[T] - g * zc[TH] - (1.0 - g) * zc[TS];

  // -- Production-side optimality --
  out[rho] = zc[rho] - (1.0 - f_mu - zc[VE] * (1.0 - p.phi2) * zc[E] / zc[Y]);
  out[W] = zc[W] - (1.0 - p.alpha) * zc[rho] * zc[Y] / p.N;
  {
    auto [phi, dphi] = adjustment_cost_t<S>(zc[I] / zc[K], p);
    (void)phi;
    out[Q] = zc[Q] * dphi - 1.0;
  }
  {
    // capital Euler; the row lives in the C^S slot (the saver budget itself
    // is redundant by Walras and checked separately)
    auto [phin, dphin] = adjustment_cost_t<S>(zn[I] / zn[K], p);
    const S payoff = zn[rho] * p.alpha * zn[Y] / zn[K] +
                     zn[Q] * ((1.0 - p.delta) + phin - dphin * (zn[I] / zn[K]));
    out[CS] = zc[Q] - sdf * payoff;
  }

  // -- Asset-pricing diagnostics (saver SDF in every scenario) --
  out[Pb] = zc[Pb] - sdf;
  out[Ps] = zc[Ps] - sdf * (zn[D] + zn[Ps]);

  // -- Marginal utilities and inequality metric --
  out[lam] = zc[lam] - pow(surpS, -sig);
  out[lamH] = zc[lamH] * zc[lam] - g * (pow(surpH, -sig) - zc[lam]);

  // -- Lifetime utility recursions --
  out[UH] = zc[UH] - felicity(surpH, p) - p.beta * zn[UH];
  out[US] = zc[US] - felicity(surpS, p) - p.beta * zn[US];
  out[Wel] = zc[Wel] - g * zc[UH] - (1.0 - g) * zc[US];

  // -- Social cost of carbon --
  if (sc.regime == Regime::UnconstrainedPlanner) {
    out[VX] = zc[VX] - sdf * (p.eta_pollution * zn[VX] + chi);
  } else {
    // With inequality the SCC prices the HtM's elevated marginal disutility;
    // under BAU lambda^H is a reporting variable and V^X a diagnostic.
    out[VX] = zc[VX] - sdf * (p.eta_pollution * zn[VX] + chi * (1.0 + zn[lamH]));
  }

  // -- Emissions pricing, abatement and the tax rule --
  switch (sc.regime) {
    case Regime::BAU:
      out[VE] = zc[VE] - zc[tau];
      out[mu] = zc[mu];   // firms do not abate at tau = 0
      out[tau] = zc[tau]; // no carbon tax
      break;
    case Regime::UnconstrainedPlanner:
      out[VE] = zc[VE] - zc[VX];
      out[mu] = zc[VE] * p.phi1 * pow(zc[Y], 1.0 - p.phi2) -
                p.theta1 * p.theta2 * pow(zc[mu], p.theta2 - 1.0) * zc[Y];
      out[tau] = zc[tau] - zc[VE];
      break;
    case Regime::ConstrainedPlanner:
      out[VE] = zc[VE] - (zc[VX] - zc[lamH] * (sc.xi / g) * zc[tau]);
      out[mu] = zc[VE] * p.phi1 * pow(zc[Y], 1.0 - p.phi2) -
                p.theta1 * p.theta2 * pow(zc[mu], p.theta2 - 1.0) * zc[Y];
      out[tau] = zc[tau] - zc[VE];
      break;
  }

  // -- Transfers and household budgets --
  switch (sc.regime) {
    case Regime::BAU:
      out[TH] = zc[TH];
      out[TS] = zc[TS];
      out[CH] = zc[CH] - zc[W] * 1.0 - zc[TH];  // HtM budget, N^H = 1
      break;
    case Regime::UnconstrainedPlanner:
      out[TH] = zc[TH] - zc[tau] * zc[E] - zc[D];
      out[TS] = zc[TS] - zc[tau] * zc[E] + g / (1.0 - g) * zc[D];
      out[CH] = zc[CH] - zc[CS];  // consumption equalization
      break;
    case Regime::ConstrainedPlanner:
      out[TH] = zc[TH] - (sc.xi / g) * zc[tau] * zc[E];
      out[TS] = zc[TS] - ((1.0 - sc.xi) / (1.0 - g)) * zc[tau] * zc[E];
      out[CH] = zc[CH] - zc[W] * 1.0 - zc[TH];
      break;
  }
}

template <class S>
std::vector<S> residuals(const Scenario& sc, const Calibration& p,
                         const std::vector<S>& zc, const std::vector<S>& zn,
                         const S& shock) {
  std::vector<S> out(kNumVars);
  residuals<S>(sc, p, std::span<const S>(zc), std::span<const S>(zn), shock,
               std::span<S>(out));
  return out;
}

}  // namespace ctax
