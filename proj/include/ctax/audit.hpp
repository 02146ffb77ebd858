#pragma once

// Accounting-identity audit for simulated or steady-state variable vectors:
// resource constraint, government budget, aggregation, the saver budget
// (Walras check) and the regime's tax rule.

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "ctax/model.hpp"

namespace ctax {

struct AuditEntry {
  std::string name;
  double worst{0.0};
  double tolerance{0.0};
  bool pass{true};
};

struct AuditReport {
  std::vector<AuditEntry> entries;
  bool pass() const {
    for (const auto& e : entries)
      if (!e.pass) return false;
    return true;
  }
};

// Audit every column of a path matrix (kNumVars x T). Tolerances are
// absolute; the defaults are loose enough for second-order approximation
// error in the stand-alone checks but identities enforced by the observation
// map should hold to machine precision.
inline AuditReport identity_audit(const Scenario& sc, const Calibration& p,
                                  const Eigen::MatrixXd& paths,
                                  double tol_exact = 1e-10,
                                  double tol_approx = 5e-3) {
  using namespace var;
  if (paths.rows() != kNumVars)
    throw validation_error("identity_audit: wrong number of rows");
  AuditReport rep;
  auto add = [&](const std::string& name, double tol) -> AuditEntry& {
    rep.entries.push_back({name, 0.0, tol, true});
    return rep.entries.back();
  };
  AuditEntry& resource = add("resource constraint", tol_approx);
  AuditEntry& budget = add("government budget", tol_exact);
  AuditEntry& aggregation = add("consumption aggregation", tol_approx);
  AuditEntry& transfers = add("transfer aggregation", tol_exact);
  AuditEntry& walras = add("saver budget (Walras)", tol_approx);
  AuditEntry& taxrule = add("tax rule", tol_exact);
  AuditEntry& emissions = add("emissions identity", tol_approx);

  for (long t = 0; t < paths.cols(); ++t) {
    const auto z = paths.col(t);
    const double f_mu = p.theta1 * std::pow(std::max(z[mu], 0.0), p.theta2);
    auto track = [&](AuditEntry& e, double gap) {
      e.worst = std::max(e.worst, std::abs(gap));
    };
    track(resource, z[Y] - z[C] - z[I] - f_mu * z[Y]);
    track(budget, z[tau] * z[E] - z[T]);
    track(aggregation, z[C] - p.gamma * z[CH] - (1.0 - p.gamma) * z[CS]);
    track(transfers, z[T] - p.gamma * z[TH] - (1.0 - p.gamma) * z[TS]);
    track(walras,
          z[CS] - z[W] * p.N - z[D] / (1.0 - p.gamma) - z[TS]);
    track(emissions,
          z[E] - (1.0 - z[mu]) * p.phi1 * std::pow(z[Y], 1.0 - p.phi2));
    switch (sc.regime) {
      case Regime::BAU:
        track(taxrule, z[tau]);
        break;
      case Regime::UnconstrainedPlanner:
        track(taxrule, z[tau] - z[VX]);
        break;
      case Regime::ConstrainedPlanner:
        track(taxrule,
              z[tau] * (1.0 + (sc.xi / p.gamma) * z[lamH]) - z[VX]);
        break;
    }
  }
  for (auto& e : rep.entries) e.pass = e.worst <= e.tolerance;
  return rep;
}

}  // namespace ctax
