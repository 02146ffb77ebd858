#pragma once

// Pruned second-order simulation, moments, stochastic steady state, impulse
// responses and welfare summaries.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ctax/perturbation.hpp"

namespace ctax {

// Recompute the accounting identities (tax rule, transfer rules, dividends)
// from the approximated core variables so that the government budget and the
// tax rule hold exactly along simulated paths.
inline void enforce_static_identities(const Scenario& sc, const Calibration& p,
                                      Eigen::Ref<Eigen::VectorXd> z) {
  using namespace var;
  // marginal utilities are static functions of surplus consumption
  const double surpS = z[CS] - p.chi * z[X];
  const double surpH = z[CH] - p.chi * z[X];
  if (surpS > 0.0 && surpH > 0.0) {
    z[lam] = std::pow(surpS, -p.sigma);
    z[lamH] = sc.regime == Regime::UnconstrainedPlanner
                  ? 0.0
                  : p.gamma * (std::pow(surpH / surpS, -p.sigma) - 1.0);
  }
  switch (sc.regime) {
    case Regime::BAU:
      z[tau] = 0.0;
      z[VE] = 0.0;
      z[TH] = z[TS] = z[T] = 0.0;
      break;
    case Regime::UnconstrainedPlanner:
      z[tau] = z[VX];
      z[VE] = z[VX];
      z[T] = z[tau] * z[E];
      z[TH] = z[tau] * z[E] + z[D];
      z[TS] = z[tau] * z[E] - p.gamma / (1.0 - p.gamma) * z[D];
      break;
    case Regime::ConstrainedPlanner:
      z[tau] = z[VX] / (1.0 + (sc.xi / p.gamma) * z[lamH]);
      z[VE] = z[tau];
      z[T] = z[tau] * z[E];
      z[TH] = (sc.xi / p.gamma) * z[tau] * z[E];
      z[TS] = ((1.0 - sc.xi) / (1.0 - p.gamma)) * z[tau] * z[E];
      break;
  }
  const double f_mu = p.theta1 * std::pow(std::max(z[mu], 0.0), p.theta2);
  z[D] = z[Y] - z[W] * p.N - z[I] - f_mu * z[Y] - z[tau] * z[E];
}

struct PrunedState {
  Eigen::VectorXd xf;  // first-order register
  Eigen::VectorXd xs;  // second-order register
};

inline PrunedState pruned_init(const PolicySolution& pol) {
  PrunedState s;
  s.xf = Eigen::VectorXd::Zero(pol.nx);
  s.xs = Eigen::VectorXd::Zero(pol.nx);
  return s;
}

inline void pruned_step(const PolicySolution& pol, PrunedState& s, double u) {
  Eigen::VectorXd xf_next = pol.hx * s.xf + pol.shock_load * u;
  Eigen::VectorXd xs_next = pol.hx * s.xs;
  if (pol.second_order)
    xs_next += 0.5 * pol.quad(pol.hxx, s.xf) + 0.5 * pol.hss;
  s.xf = xf_next;
  s.xs = xs_next;
}

// Full level vector at a pruned state (quadratic terms fed by the
// first-order register only).
inline Eigen::VectorXd pruned_observe(const Scenario& sc, const Calibration& p,
                                      const PolicySolution& pol,
                                      const PrunedState& s) {
  Eigen::VectorXd z(pol.n);
  Eigen::VectorXd x = s.xf + s.xs;
  Eigen::VectorXd y = pol.gx * x;
  if (pol.second_order)
    y += 0.5 * pol.quad(pol.gxx, s.xf) + 0.5 * pol.gss;
  for (int i = 0; i < pol.nx; ++i) z[i] = pol.point[i] + x[i];
  for (int i = 0; i < pol.ny; ++i) z[pol.nx + i] = pol.point[pol.nx + i] + y[i];
  enforce_static_identities(sc, p, z);
  return z;
}

inline Eigen::VectorXd stochastic_steady_state(const Scenario& sc,
                                               const Calibration& p,
                                               const PolicySolution& pol) {
  PrunedState s = pruned_init(pol);
  for (long it = 0; it < 1000000; ++it) {
    Eigen::VectorXd prev = s.xs;
    pruned_step(pol, s, 0.0);
    if ((s.xs - prev).lpNorm<Eigen::Infinity>() <= 1e-12)
      return pruned_observe(sc, p, pol, s);
  }
  throw solver_error("stochastic steady state: no convergence in 1e6 iterations");
}

inline PrunedState stochastic_rest_registers(const PolicySolution& pol) {
  PrunedState s = pruned_init(pol);
  for (long it = 0; it < 1000000; ++it) {
    Eigen::VectorXd prev = s.xs;
    pruned_step(pol, s, 0.0);
    if ((s.xs - prev).lpNorm<Eigen::Infinity>() <= 1e-12) return s;
  }
  throw solver_error("stochastic steady state: no convergence in 1e6 iterations");
}

// Seeded pruned simulation; identical seed implies bit-identical paths.
inline Eigen::MatrixXd simulate_pruned(const Scenario& sc, const Calibration& p,
                                       const PolicySolution& pol, long horizon,
                                       long burn_in, std::uint64_t seed) {
  if (horizon < 1) throw validation_error("simulate: horizon must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  PrunedState s = pruned_init(pol);
  Eigen::MatrixXd paths(pol.n, horizon);
  for (long t = 0; t < burn_in + horizon; ++t) {
    pruned_step(pol, s, pol.sigma_eta * normal(rng));
    if (t >= burn_in) {
      Eigen::VectorXd z = pruned_observe(sc, p, pol, s);
      using namespace var;
      if (z[CH] <= p.chi * z[X] || z[CS] <= p.chi * z[X])
        throw solver_error("simulate: utility-domain violation at period " +
                           std::to_string(t - burn_in));
      paths.col(t - burn_in) = z;
    }
  }
  return paths;
}

struct SimulationReport {
  Scenario scenario;
  std::uint64_t seed{0};
  long horizon{0}, burn_in{0};
  Eigen::VectorXd mean;         // levels
  Eigen::VectorXd mean_se;      // batch-mean Monte-Carlo standard errors
  Eigen::VectorXd log_std_pct;  // std of logs, percent
  Eigen::VectorXd log_std_se;
  std::vector<bool> log_flagged;  // non-positive under the log, not computed
  Eigen::VectorXd stoch_ss;
  double welfare_mean{0.0}, utility_h_mean{0.0}, utility_s_mean{0.0};
};

inline SimulationReport moments(const Scenario& sc, const Eigen::MatrixXd& paths,
                                const Eigen::VectorXd& stoch_ss) {
  const int n = (int)paths.rows();
  const long T = paths.cols();
  if (T <= 0) throw validation_error("moments: empty paths");
  SimulationReport rep;
  rep.scenario = sc;
  rep.horizon = T;
  rep.stoch_ss = stoch_ss;
  rep.mean.resize(n);
  rep.mean_se.resize(n);
  rep.log_std_pct.setZero(n);
  rep.log_std_se.setZero(n);
  rep.log_flagged.assign(n, false);

  const int nb = std::max(1, (int)std::min<long>(50, T));
  const long bl = T / nb;
  for (int i = 0; i < n; ++i) {
    auto row = paths.row(i);
    rep.mean[i] = row.mean();
    // batch means for autocorrelation-robust standard errors
    double bvar = 0.0;
    for (int bidx = 0; bidx < nb; ++bidx) {
      double bm = row.segment(bidx * bl, bl).mean();
      bvar += (bm - rep.mean[i]) * (bm - rep.mean[i]);
    }
    rep.mean_se[i] = std::sqrt(bvar / (nb - 1.0) / nb);

    const double span = row.maxCoeff() - row.minCoeff();
    if (span <= 1e-9 * std::max(1.0, std::abs(rep.mean[i]))) {
      rep.log_std_pct[i] = 0.0;  // deterministic in this regime
      continue;
    }
    Eigen::ArrayXd logs;
    if (row.minCoeff() <= 0.0) {
      // report the positive-subsample dispersion but flag the row
      rep.log_flagged[i] = true;
      std::vector<double> pos;
      pos.reserve(T);
      for (long t = 0; t < T; ++t)
        if (row[t] > 0.0) pos.push_back(std::log(row[t]));
      if (pos.size() < 100) continue;
      logs = Eigen::Map<Eigen::ArrayXd>(pos.data(), pos.size());
      const double lm = logs.mean();
      rep.log_std_pct[i] =
          std::sqrt((logs - lm).square().sum() / (logs.size() - 1.0)) * 100.0;
      continue;
    }
    logs = row.transpose().array().log();
    const double lm = logs.mean();
    rep.log_std_pct[i] = std::sqrt((logs - lm).square().sum() / (T - 1.0)) * 100.0;
    double bstd_mean = 0.0, bstd_var = 0.0;
    std::vector<double> bstds(nb);
    for (int bidx = 0; bidx < nb; ++bidx) {
      auto seg = logs.segment(bidx * bl, bl);
      double sm = seg.mean();
      bstds[bidx] = std::sqrt((seg - sm).square().sum() / (bl - 1.0)) * 100.0;
      bstd_mean += bstds[bidx] / nb;
    }
    for (int bidx = 0; bidx < nb; ++bidx)
      bstd_var += (bstds[bidx] - bstd_mean) * (bstds[bidx] - bstd_mean);
    rep.log_std_se[i] = std::sqrt(bstd_var / (nb - 1.0) / nb);
  }
  using namespace var;
  rep.welfare_mean = rep.mean[Wel];
  rep.utility_h_mean = rep.mean[UH];
  rep.utility_s_mean = rep.mean[US];
  return rep;
}

struct IrfSet {
  Scenario scenario;
  double shock_sds{0.0};
  int horizon{0};
  Eigen::MatrixXd dev;  // (horizon+1) x n, absolute deviations x 100
};

inline IrfSet irf(const Scenario& sc, const Calibration& p,
                  const PolicySolution& pol, double shock_sds, int horizon) {
  IrfSet set;
  set.scenario = sc;
  set.shock_sds = shock_sds;
  set.horizon = horizon;
  set.dev.setZero(horizon + 1, pol.n);
  PrunedState rest = stochastic_rest_registers(pol);
  Eigen::VectorXd base = pruned_observe(sc, p, pol, rest);
  PrunedState s = rest;
  pruned_step(pol, s, shock_sds * pol.sigma_eta);
  for (int h = 0; h <= horizon; ++h) {
    set.dev.row(h) = (pruned_observe(sc, p, pol, s) - base).transpose() * 100.0;
    pruned_step(pol, s, 0.0);
  }
  return set;
}

// Ensemble-averaged generalized IRF: average difference between a shocked and
// an unshocked path sharing the same subsequent innovations.
inline IrfSet girf(const Scenario& sc, const Calibration& p,
                   const PolicySolution& pol, double shock_sds, int horizon,
                   int replications, std::uint64_t seed) {
  IrfSet set;
  set.scenario = sc;
  set.shock_sds = shock_sds;
  set.horizon = horizon;
  set.dev.setZero(horizon + 1, pol.n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  PrunedState rest = stochastic_rest_registers(pol);
  for (int r = 0; r < replications; ++r) {
    PrunedState a = rest, b = rest;
    // randomize the starting point with a short common warmup
    for (int w = 0; w < 50; ++w) {
      double u = pol.sigma_eta * normal(rng);
      pruned_step(pol, a, u);
      pruned_step(pol, b, u);
    }
    double u0 = pol.sigma_eta * normal(rng);
    pruned_step(pol, a, u0 + shock_sds * pol.sigma_eta);
    pruned_step(pol, b, u0);
    for (int h = 0; h <= horizon; ++h) {
      set.dev.row(h) += (pruned_observe(sc, p, pol, a) - pruned_observe(sc, p, pol, b))
                            .transpose() * (100.0 / replications);
      double u = pol.sigma_eta * normal(rng);
      pruned_step(pol, a, u);
      pruned_step(pol, b, u);
    }
  }
  return set;
}

}  // namespace ctax
