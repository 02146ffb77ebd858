#pragma once

// Exact first and second derivatives of a residual system at its steady
// state, obtained by threading hyper-dual numbers through the evaluation.
// Input ordering of the stacked argument: z_curr (n), z_next (n), shock (1).

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "ctax/hyperdual.hpp"
#include "ctax/model.hpp"
#include "ctax/steady_state.hpp"

namespace ctax {

// A square rational-expectations system E_t F(z_{t+1}, z_t, u_{t+1}) = 0
// with the first nx slots of z predetermined.
struct ResidualSystem {
  int n{0};
  int nx{0};
  std::vector<double> rest_point;  // z at the deterministic rest point
  std::vector<std::string> names;  // per-equation labels for diagnostics
  std::function<void(std::span<const HyperDual> zc, std::span<const HyperDual> zn,
                     const HyperDual& shock, std::span<HyperDual> out)>
      eval;

  void eval_real(std::span<const double> zc, std::span<const double> zn,
                 double shock, std::span<double> out) const {
    std::vector<HyperDual> zch(zc.begin(), zc.end()), znh(zn.begin(), zn.end());
    std::vector<HyperDual> o(n);
    eval(zch, znh, HyperDual(shock), o);
    for (int i = 0; i < n; ++i) out[i] = o[i].v;
  }
};

inline ResidualSystem model_system(const Scenario& sc, const Calibration& p,
                                   const SteadyState& ss) {
  ResidualSystem sys;
  sys.n = kNumVars;
  sys.nx = kNumStates;
  sys.rest_point = ss.z;
  auto layout = variable_layout(sc);
  sys.names.assign(layout.names.begin(), layout.names.end());
  sys.eval = [sc, p](std::span<const HyperDual> zc, std::span<const HyperDual> zn,
                     const HyperDual& shock, std::span<HyperDual> out) {
    residuals<HyperDual>(sc, p, zc, zn, shock, out);
  };
  return sys;
}

struct DerivativeBundle {
  int n{0};
  int nx{0};
  std::vector<double> point;          // evaluation point (steady-state z)
  std::vector<std::string> names;
  Eigen::MatrixXd J;                  // n x (2n+1)
  std::vector<Eigen::MatrixXd> H;     // per equation, (2n+1) x (2n+1)

  int idx_curr(int i) const { return i; }
  int idx_next(int i) const { return n + i; }
  int idx_shock() const { return 2 * n; }

  Eigen::MatrixXd f_curr() const { return J.middleCols(0, n); }
  Eigen::MatrixXd f_next() const { return J.middleCols(n, n); }
  Eigen::VectorXd f_shock() const { return J.col(2 * n); }
};

inline DerivativeBundle differentiate_system(const ResidualSystem& sys) {
  const int n = sys.n;
  const int m = 2 * n + 1;
  DerivativeBundle b;
  b.n = n;
  b.nx = sys.nx;
  b.point = sys.rest_point;
  b.names = sys.names;
  b.J.setZero(n, m);
  b.H.assign(n, Eigen::MatrixXd::Zero(m, m));

  std::vector<HyperDual> zc(n), zn(n), out(n);
  auto seed = [&](int i, int j) {
    for (int k = 0; k < n; ++k) {
      zc[k] = HyperDual(sys.rest_point[k], k == i, k == j, 0.0);
      zn[k] = HyperDual(sys.rest_point[k], n + k == i, n + k == j, 0.0);
    }
    HyperDual shock(0.0, i == m - 1, j == m - 1, 0.0);
    sys.eval(zc, zn, shock, out);
  };

  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      seed(i, j);
      for (int e = 0; e < n; ++e) {
        if (!std::isfinite(out[e].d1) || !std::isfinite(out[e].d12))
          throw solver_error("non-finite derivative in equation '" +
                             (e < (int)b.names.size() ? b.names[e] : std::to_string(e)) +
                             "'");
        if (j == i) b.J(e, i) = out[e].d1;
        b.H[e](i, j) = out[e].d12;
        b.H[e](j, i) = out[e].d12;
      }
    }
  }
  return b;
}

inline DerivativeBundle differentiate_system(const Scenario& sc,
                                             const Calibration& p,
                                             const SteadyState& ss) {
  if (max_abs_residual(sc, p, ss.z) > 1e-8)
    throw solver_error("differentiate_system: steady state not certified");
  return differentiate_system(model_system(sc, p, ss));
}

}  // namespace ctax
