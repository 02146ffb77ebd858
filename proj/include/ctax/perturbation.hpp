#pragma once

// First- and second-order rational-expectations policy functions.
//
// First order: ordered generalized Schur (QZ) decomposition of the pencil
// implied by the linearized system, saddle-path split at the unit circle.
// Second order: quadratic and uncertainty-correction coefficients from the
// linear system implied by differentiating E_t F = 0 twice, with Gaussian
// innovation moments (odd moments zero).

#include <Eigen/Dense>
#include <complex>
#include <lapacke.h>
#include <string>
#include <vector>

#include "ctax/derivatives.hpp"

namespace ctax {

struct PolicySolution {
  int n{0}, nx{0}, ny{0};
  std::vector<double> point;  // steady-state z
  std::vector<std::string> names;
  double sigma_eta{0.0};  // innovation s.d. used for uncertainty terms

  // states: x' = hx x + 1/2 hxx(x,x) + 1/2 hss + shock_load * u
  Eigen::MatrixXd hx;          // nx x nx
  Eigen::MatrixXd hxx;         // nx x nx*nx (column j*nx+k)
  Eigen::VectorXd hss;         // nx
  Eigen::VectorXd shock_load;  // nx

  // controls: y = gx x + 1/2 gxx(x,x) + 1/2 gss
  Eigen::MatrixXd gx;   // ny x nx
  Eigen::MatrixXd gxx;  // ny x nx*nx
  Eigen::VectorXd gss;  // ny

  std::vector<std::complex<double>> eigenvalues;
  int stable_count{0};
  bool blanchard_kahn_ok{false};
  std::vector<std::string> warnings;
  bool second_order{false};

  Eigen::VectorXd quad(const Eigen::MatrixXd& Txx, const Eigen::VectorXd& x) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(Txx.rows());
    for (int j = 0; j < nx; ++j)
      for (int k = 0; k < nx; ++k)
        out += Txx.col(j * nx + k) * (x[j] * x[k]);
    return out;
  }

  // deviation-form maps
  Eigen::VectorXd next_state(const Eigen::VectorXd& x, double u) const {
    Eigen::VectorXd out = hx * x + shock_load * u;
    if (second_order) out += 0.5 * quad(hxx, x) + 0.5 * hss;
    return out;
  }
  Eigen::VectorXd observe(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out = gx * x;
    if (second_order) out += 0.5 * quad(gxx, x) + 0.5 * gss;
    return out;
  }

  PolicySolution first_order_only() const {
    PolicySolution p = *this;
    p.hxx.setZero();
    p.hss.setZero();
    p.gxx.setZero();
    p.gss.setZero();
    p.second_order = false;
    return p;
  }
};

namespace detail {

inline lapack_logical select_stable(const double* ar, const double* ai,
                                    const double* beta) {
  // transition root lambda = alpha/beta; stable if |alpha| < |beta|
  return (*ar) * (*ar) + (*ai) * (*ai) < (*beta) * (*beta);
}

}  // namespace detail

inline PolicySolution solve_first_order(const DerivativeBundle& b,
                                        double sigma_eta = 0.0) {
  const int n = b.n, nx = b.nx, ny = n - nx;
  PolicySolution sol;
  sol.n = n; sol.nx = nx; sol.ny = ny;
  sol.point = b.point;
  sol.names = b.names;
  sol.sigma_eta = sigma_eta;

  // A z_{t+1} + B z_t = 0  ->  pencil (-B, A); dgges orders selected
  // (stable) eigenvalues to the top-left.
  Eigen::MatrixXd A = b.f_next();
  Eigen::MatrixXd S = -b.f_curr();  // becomes the "numerator" matrix
  Eigen::MatrixXd T = A;
  Eigen::MatrixXd Q(n, n), Z(n, n);
  std::vector<double> ar(n), ai(n), be(n);
  lapack_int sdim = 0;
  lapack_int info = LAPACKE_dgges(
      LAPACK_COL_MAJOR, 'V', 'V', 'S', detail::select_stable, n, S.data(), n,
      T.data(), n, &sdim, ar.data(), ai.data(), be.data(), Q.data(), n,
      Z.data(), n);
  if (info != 0)
    throw solver_error("QZ decomposition failed, info=" + std::to_string(info));

  sol.eigenvalues.resize(n);
  for (int i = 0; i < n; ++i) {
    if (be[i] == 0.0)
      sol.eigenvalues[i] = {std::numeric_limits<double>::infinity(), 0.0};
    else
      sol.eigenvalues[i] = std::complex<double>(ar[i], ai[i]) / be[i];
    double mod = std::abs(sol.eigenvalues[i]);
    if (std::isfinite(mod) && std::abs(mod - 1.0) < 1e-8)
      sol.warnings.push_back("eigenvalue within 1e-8 of the unit circle: |lambda|=" +
                             std::to_string(mod));
  }
  sol.stable_count = sdim;
  if (sdim != nx) {
    throw solver_error(
        std::string(sdim < nx ? "explosiveness" : "indeterminacy") +
        ": " + std::to_string(sdim) + " stable eigenvalues for " +
        std::to_string(nx) + " predetermined states");
  }
  sol.blanchard_kahn_ok = true;

  Eigen::MatrixXd Z11 = Z.topLeftCorner(nx, nx);
  Eigen::MatrixXd Z21 = Z.bottomLeftCorner(ny, nx);
  Eigen::MatrixXd S11 = S.topLeftCorner(nx, nx);
  Eigen::MatrixXd T11 = T.topLeftCorner(nx, nx);
  Eigen::FullPivLU<Eigen::MatrixXd> luZ11(Z11);
  if (!luZ11.isInvertible())
    throw solver_error("singular Z11 block: states not spanned by stable subspace");
  Eigen::MatrixXd Z11inv = luZ11.inverse();
  sol.gx = Z21 * Z11inv;
  sol.hx = Z11 * T11.fullPivLu().solve(S11) * Z11inv;

  // shock loading from the state-transition rows only: the remaining rows
  // hold in expectation and do not restrict the innovation response
  Eigen::MatrixXd M = b.f_next().topLeftCorner(nx, nx) +
                      b.f_next().topRows(nx).rightCols(ny) * sol.gx;
  sol.shock_load = M.fullPivLu().solve(-b.f_shock().head(nx));

  sol.hxx.setZero(nx, nx * nx);
  sol.hss.setZero(nx);
  sol.gxx.setZero(ny, nx * nx);
  sol.gss.setZero(ny);
  sol.second_order = false;
  return sol;
}

inline PolicySolution solve_second_order(const DerivativeBundle& b,
                                         const PolicySolution& first,
                                         double sigma_eta) {
  if (!first.blanchard_kahn_ok)
    throw solver_error("second order requires a Blanchard-Kahn certified first order");
  const int n = b.n, nx = b.nx, ny = n - nx;
  PolicySolution sol = first;
  sol.sigma_eta = sigma_eta;

  const Eigen::MatrixXd Fz = b.f_curr();
  const Eigen::MatrixXd Fzn = b.f_next();
  const Eigen::MatrixXd Fx = Fz.leftCols(nx);
  const Eigen::MatrixXd Fy = Fz.rightCols(ny);
  const Eigen::MatrixXd Fxn = Fzn.leftCols(nx);
  const Eigen::MatrixXd Fyn = Fzn.rightCols(ny);
  const Eigen::MatrixXd& hx = first.hx;
  const Eigen::MatrixXd& gx = first.gx;

  const int m = 2 * n + 1;
  // first-order response of the stacked argument to state j
  Eigen::MatrixXd D(m, nx);
  D.setZero();
  D.block(0, 0, nx, nx).setIdentity();
  D.block(nx, 0, ny, nx) = gx;
  D.block(n, 0, nx, nx) = hx;
  D.block(n + nx, 0, ny, nx) = gx * hx;

  // unknown ordering: for each pair p = j*nx+k, [hxx(:,p); gxx(:,p)]
  const int np = nx * nx;
  const int nu = n * np;
  Eigen::MatrixXd LHS = Eigen::MatrixXd::Zero(nu, nu);
  Eigen::VectorXd RHS = Eigen::VectorXd::Zero(nu);

  const Eigen::MatrixXd Hcoef = Fxn + Fyn * gx;  // multiplies hxx columns
  for (int j = 0; j < nx; ++j) {
    for (int k = 0; k < nx; ++k) {
      const int p = j * nx + k;
      const int row0 = p * n;
      // known term: Hessians contracted with first-order directions
      Eigen::VectorXd c(n);
      for (int e = 0; e < n; ++e)
        c[e] = D.col(j).transpose() * b.H[e] * D.col(k);
      RHS.segment(row0, n) = -c;
      // hxx block (same pair)
      LHS.block(row0, p * n, n, nx) += Hcoef;
      // gxx blocks: own pair via Fy, cross pairs via Fyn and hx
      LHS.block(row0, p * n + nx, n, ny) += Fy;
      for (int mj = 0; mj < nx; ++mj)
        for (int mk = 0; mk < nx; ++mk) {
          const int q = mj * nx + mk;
          LHS.block(row0, q * n + nx, n, ny) += Fyn * (hx(mj, j) * hx(mk, k));
        }
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(LHS);
  if (!lu.isInvertible())
    throw solver_error("singular second-order (Sylvester) operator");
  Eigen::VectorXd sol2 = lu.solve(RHS);

  sol.hxx.resize(nx, np);
  sol.gxx.resize(ny, np);
  for (int p = 0; p < np; ++p) {
    sol.hxx.col(p) = sol2.segment(p * n, nx);
    sol.gxx.col(p) = sol2.segment(p * n + nx, ny);
  }

  // uncertainty correction: one Gaussian innovation with variance sigma_eta^2
  const Eigen::VectorXd& N = first.shock_load;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
  v.segment(n, nx) = N;
  v.segment(n + nx, ny) = gx * N;
  v[m - 1] = 1.0;

  Eigen::VectorXd css = Eigen::VectorXd::Zero(n);
  for (int e = 0; e < n; ++e) css[e] = v.transpose() * b.H[e] * v;
  // gxx contracted twice with the shock loading
  Eigen::VectorXd gxxNN = Eigen::VectorXd::Zero(ny);
  for (int j = 0; j < nx; ++j)
    for (int k = 0; k < nx; ++k)
      gxxNN += sol.gxx.col(j * nx + k) * (N[j] * N[k]);
  css += Fyn * gxxNN;
  css *= sigma_eta * sigma_eta;

  Eigen::MatrixXd Mss(n, n);
  Mss.leftCols(nx) = Fyn * gx + Fxn;   // multiplies hss
  Mss.rightCols(ny) = Fyn + Fy;        // multiplies gss
  Eigen::FullPivLU<Eigen::MatrixXd> luss(Mss);
  if (!luss.isInvertible())
    throw solver_error("singular uncertainty-correction operator");
  Eigen::VectorXd ss2 = luss.solve(-css);
  sol.hss = ss2.head(nx);
  sol.gss = ss2.tail(ny);
  sol.second_order = true;
  return sol;
}

inline PolicySolution solve_policy(const Scenario& sc, const Calibration& p,
                                   const SteadyState& ss, int order = 2) {
  auto bundle = differentiate_system(sc, p, ss);
  auto fo = solve_first_order(bundle, p.sigma_eta);
  if (order == 1) return fo;
  return solve_second_order(bundle, fo, p.sigma_eta);
}

}  // namespace ctax
