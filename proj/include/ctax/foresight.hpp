#pragma once

// Deterministic (perfect-foresight) transition paths via a stacked Newton
// solve. Serves as a nonlinear reference solution for the perturbation
// approximation: a path started from a displaced state must converge back to
// the deterministic steady state.

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <string>
#include <vector>

#include "ctax/hyperdual.hpp"
#include "ctax/steady_state.hpp"

namespace ctax {

struct ForesightPath {
  Scenario scenario;
  Eigen::MatrixXd z;       // kNumVars x (T+1), levels, column t = period t
  int iterations{0};
  double residual_norm{0.0};  // interior equations at the solution
  double terminal_gap{0.0};   // state-transition mismatch at the horizon end
};

namespace detail {

// One-sided first derivatives of the residual block F(z_t, z_{t+1}, u) with
// respect to all 2n+1 inputs, via hyperdual seeding.
inline void block_jacobian(const Scenario& sc, const Calibration& p,
                           const Eigen::VectorXd& zc, const Eigen::VectorXd& zn,
                           double u, Eigen::MatrixXd& Fc, Eigen::MatrixXd& Fn) {
  const int n = kNumVars;
  std::vector<HyperDual> hc(n), hn(n), out(n);
  for (int i = 0; i < n; ++i) {
    hc[i] = HyperDual{zc[i]};
    hn[i] = HyperDual{zn[i]};
  }
  HyperDual hu{u};
  auto run = [&] {
    residuals<HyperDual>(sc, p, std::span<const HyperDual>(hc),
                         std::span<const HyperDual>(hn), hu,
                         std::span<HyperDual>(out));
  };
  for (int j = 0; j < n; ++j) {
    hc[j].d1 = 1.0;
    run();
    hc[j].d1 = 0.0;
    for (int i = 0; i < n; ++i) Fc(i, j) = out[i].d1;
  }
  for (int j = 0; j < n; ++j) {
    hn[j].d1 = 1.0;
    run();
    hn[j].d1 = 0.0;
    for (int i = 0; i < n; ++i) Fn(i, j) = out[i].d1;
  }
}

}  // namespace detail

// Solve for the perfect-foresight path of length T started from the state
// vector x0 = (K_0, X_0, a_0), with an optional deterministic innovation
// sequence u (u[t] enters the transition from period t to t+1). The path is
// pinned down by the steady state at the far end of the horizon.
inline ForesightPath solve_foresight(const Scenario& sc, const Calibration& p,
                                     const SteadyState& ss,
                                     const Eigen::Vector3d& x0,
                                     const std::vector<double>& shocks, int T,
                                     int max_iter = 60) {
  using namespace var;
  const int n = kNumVars, nx = kNumStates, nc = kNumControls;
  if (T < 2) throw validation_error("solve_foresight: horizon must be >= 2");
  const Eigen::VectorXd zss =
      Eigen::Map<const Eigen::VectorXd>(ss.z.data(), n);

  auto shock_at = [&](int t) {
    return (t < (int)shocks.size()) ? shocks[t] : 0.0;
  };

  // Unknown layout: controls of period 0, then full vectors for periods 1..T.
  const int m = nc + n * T;
  auto col_of = [&](int t, int v) -> int {
    if (t == 0) return (v < nx) ? -1 : v - nx;  // period-0 states are given
    return nc + (t - 1) * n + v;
  };

  Eigen::VectorXd w(m);
  for (int v = nx; v < n; ++v) w[v - nx] = zss[v];
  for (int t = 1; t <= T; ++t)
    for (int v = 0; v < n; ++v) w[col_of(t, v)] = zss[v];

  auto unpack = [&](const Eigen::VectorXd& vec, int t) -> Eigen::VectorXd {
    Eigen::VectorXd z(n);
    if (t == 0) {
      z[K] = x0[0]; z[X] = x0[1]; z[a] = x0[2];
      for (int v = nx; v < n; ++v) z[v] = vec[v - nx];
    } else if (t <= T) {
      for (int v = 0; v < n; ++v) z[v] = vec[col_of(t, v)];
    } else {
      z = zss;
    }
    return z;
  };

  // Stacked residual: full blocks for t = 0..T-1; at the horizon end only the
  // intratemporal and Euler rows bind (the state transitions into the fixed
  // terminal point are reported as terminal_gap instead).
  const int rows = n * T + nc;
  Eigen::VectorXd res(rows), blk(n);
  auto assemble_residual = [&](const Eigen::VectorXd& vec, Eigen::VectorXd& r) {
    for (int t = 0; t <= T; ++t) {
      Eigen::VectorXd zc = unpack(vec, t), zn = unpack(vec, t + 1);
      residuals<double>(sc, p, std::span<const double>(zc.data(), n),
                        std::span<const double>(zn.data(), n), shock_at(t),
                        std::span<double>(blk.data(), n));
      if (t < T)
        r.segment(n * t, n) = blk;
      else
        r.segment(n * T, nc) = blk.segment(nx, nc);
    }
  };

  Eigen::MatrixXd Fc(n, n), Fn(n, n);
  std::vector<Eigen::Triplet<double>> trips;
  double rnorm = 0.0;
  int iter = 0;
  assemble_residual(w, res);
  rnorm = res.lpNorm<Eigen::Infinity>();
  for (; iter < max_iter && rnorm > 1e-10; ++iter) {
    trips.clear();
    for (int t = 0; t <= T; ++t) {
      Eigen::VectorXd zc = unpack(w, t), zn = unpack(w, t + 1);
      detail::block_jacobian(sc, p, zc, zn, shock_at(t), Fc, Fn);
      const int r0 = (t < T) ? n * t : n * T;
      const int nrow = (t < T) ? n : nc;
      const int rshift = (t < T) ? 0 : nx;
      for (int i = 0; i < nrow; ++i) {
        for (int j = 0; j < n; ++j) {
          int c = col_of(t, j);
          if (c >= 0 && Fc(i + rshift, j) != 0.0)
            trips.emplace_back(r0 + i, c, Fc(i + rshift, j));
          if (t + 1 <= T) {
            int cn = col_of(t + 1, j);
            if (cn >= 0 && Fn(i + rshift, j) != 0.0)
              trips.emplace_back(r0 + i, cn, Fn(i + rshift, j));
          }
        }
      }
    }
    Eigen::SparseMatrix<double> J(rows, m);
    J.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success)
      throw solver_error("solve_foresight: singular stacked Jacobian");
    Eigen::VectorXd step = lu.solve(res);

    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h < 40; ++h) {
      Eigen::VectorXd trial = w - lambda * step;
      try {
        Eigen::VectorXd rtrial(rows);
        assemble_residual(trial, rtrial);
        double tn = rtrial.lpNorm<Eigen::Infinity>();
        if (tn < rnorm || tn < 1e-10) {
          w = trial;
          res = rtrial;
          rnorm = tn;
          accepted = true;
          break;
        }
      } catch (const std::domain_error&) {
        // step left the admissible region; damp further
      }
      lambda *= 0.5;
    }
    if (!accepted)
      throw solver_error("solve_foresight: line search failed at residual " +
                         std::to_string(rnorm));
  }
  if (rnorm > 1e-8)
    throw solver_error("solve_foresight: no convergence, residual " +
                       std::to_string(rnorm));

  ForesightPath path;
  path.scenario = sc;
  path.iterations = iter;
  path.residual_norm = rnorm;
  path.z.resize(n, T + 1);
  for (int t = 0; t <= T; ++t) path.z.col(t) = unpack(w, t);

  // state-transition mismatch into the terminal condition
  Eigen::VectorXd zc = unpack(w, T);
  residuals<double>(sc, p, std::span<const double>(zc.data(), n),
                    std::span<const double>(zss.data(), n), 0.0,
                    std::span<double>(blk.data(), n));
  path.terminal_gap = blk.head(nx).lpNorm<Eigen::Infinity>();
  return path;
}

}  // namespace ctax
