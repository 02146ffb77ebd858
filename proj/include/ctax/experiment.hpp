#pragma once

// Experiment harness: config parsing, end-to-end runs (steady state ->
// perturbation -> simulation -> tables), CSV output, comparison against the
// embedded reference tables, and the sensitivity suite.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ctax/audit.hpp"
#include "ctax/reference.hpp"
#include "ctax/simulate.hpp"
#include "ctax/steady_state.hpp"

namespace ctax {

struct ExperimentConfig {
  std::string name{"experiment"};
  std::string preset{"baseline"};
  std::uint64_t seed{20240101};
  long horizon{100000};
  long burn_in{1000};
  int order{2};
  int irf_horizon{200};
  double shock_sds{1.0};
  bool girf{false};
  int girf_replications{500};
  Overrides overrides;
  std::vector<Scenario> scenarios;
};

inline Scenario scenario_from_name(const std::string& name) {
  if (name == "bau") return Scenario::bau();
  if (name == "unconstrained") return Scenario::unconstrained();
  if (name == "constrained_xi0") return Scenario::constrained(0.0);
  if (name == "constrained_uniform" || name == "constrained_xigamma")
    return Scenario{Regime::ConstrainedPlanner, -1.0};  // xi set to gamma later
  if (name == "constrained_xi1") return Scenario::constrained(1.0);
  if (name.rfind("constrained_xi=", 0) == 0)
    return Scenario::constrained(std::stod(name.substr(15)));
  throw validation_error("config: unknown scenario '" + name + "'");
}

inline std::vector<Scenario> default_scenarios() {
  return {Scenario::bau(), Scenario::unconstrained(), Scenario::constrained(0.0),
          Scenario{Regime::ConstrainedPlanner, -1.0}, Scenario::constrained(1.0)};
}

// Flat key/value config with [experiment], [overrides] and [scenarios]
// sections; '#' starts a comment, blank lines are ignored.
inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line, section = "experiment";
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const char* ws = " \t\r\n";
      auto b = s.find_first_not_of(ws);
      if (b == std::string::npos) return std::string();
      return s.substr(b, s.find_last_not_of(ws) - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw validation_error("config line " + std::to_string(lineno) +
                               ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "experiment" && section != "overrides" &&
          section != "scenarios")
        throw validation_error("config: unknown section '" + section + "'");
      continue;
    }
    std::string key = line, val;
    auto eq = line.find('=');
    if (eq != std::string::npos) {
      key = trim(line.substr(0, eq));
      val = trim(line.substr(eq + 1));
    }
    auto num = [&](const std::string& v) {
      try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
      } catch (const std::exception&) {
        throw validation_error("config line " + std::to_string(lineno) +
                               ": expected a number, got '" + v + "'");
      }
    };
    if (section == "scenarios") {
      cfg.scenarios.push_back(scenario_from_name(line));
    } else if (section == "overrides") {
      if (!known_parameter(key))
        throw validation_error("config line " + std::to_string(lineno) +
                               ": unknown parameter '" + key + "'");
      cfg.overrides[key] = num(val);
    } else {
      if (eq == std::string::npos)
        throw validation_error("config line " + std::to_string(lineno) +
                               ": expected key = value");
      if (key == "name") cfg.name = val;
      else if (key == "preset") cfg.preset = val;
      else if (key == "seed") cfg.seed = (std::uint64_t)num(val);
      else if (key == "horizon") cfg.horizon = (long)num(val);
      else if (key == "burn_in") cfg.burn_in = (long)num(val);
      else if (key == "order") cfg.order = (int)num(val);
      else if (key == "irf_horizon") cfg.irf_horizon = (int)num(val);
      else if (key == "shock_sds") cfg.shock_sds = num(val);
      else if (key == "girf") cfg.girf = num(val) != 0.0;
      else if (key == "girf_replications") cfg.girf_replications = (int)num(val);
      else
        throw validation_error("config: unknown key '" + key + "'");
    }
  }
  if (cfg.order != 1 && cfg.order != 2)
    throw validation_error("config: order must be 1 or 2");
  if (cfg.horizon < 1) throw validation_error("config: horizon must be >= 1");
  if (cfg.burn_in < 0) throw validation_error("config: burn_in must be >= 0");
  if (cfg.scenarios.empty()) cfg.scenarios = default_scenarios();
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("config: cannot open '" + path + "'");
  return parse_config(in);
}

struct ScenarioResult {
  Scenario scenario;
  bool ok{false};
  std::string error;
  SteadyState ss;
  PolicySolution policy;
  SimulationReport report;
  IrfSet irf;
  AuditReport audit;
  Eigen::VectorXd mean_rows;  // reference-table layout
  Eigen::VectorXd std_rows;
};

struct ExperimentResult {
  ExperimentConfig config;
  Calibration calib;
  std::vector<ScenarioResult> scenarios;
  bool all_ok() const {
    for (const auto& s : scenarios)
      if (!s.ok) return false;
    return true;
  }
};

namespace detail {

inline std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline void write_table(const std::string& path,
                        const std::vector<ScenarioResult>& scen,
                        const std::array<std::string, (size_t)ref::kNumMeanRows>& names,
                        bool means) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot write '" + path + "'");
  out << "variable";
  for (const auto& s : scen) out << "," << s.scenario.name();
  out << "\n";
  const int rows = means ? ref::kNumMeanRows : ref::kNumStdRows;
  for (int i = 0; i < rows; ++i) {
    out << names[i];
    for (const auto& s : scen) {
      out << ",";
      if (s.ok) out << fmt6(means ? s.mean_rows[i] : s.std_rows[i]);
      else out << "nan";
    }
    out << "\n";
  }
}

inline void write_std_table(const std::string& path,
                            const std::vector<ScenarioResult>& scen) {
  std::array<std::string, (size_t)ref::kNumMeanRows> names{};
  for (int i = 0; i < ref::kNumStdRows; ++i) names[i] = ref::kStdRowNames[i];
  write_table(path, scen, names, false);
}

inline void write_irf(const std::string& path, const VariableLayout& layout,
                      const IrfSet& set) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot write '" + path + "'");
  out << "horizon";
  for (int v = 0; v < kNumVars; ++v) out << "," << layout.names[v];
  out << "\n";
  for (int h = 0; h <= set.horizon; ++h) {
    out << h;
    for (int v = 0; v < kNumVars; ++v) out << "," << fmt6(set.dev(h, v));
    out << "\n";
  }
}

}  // namespace detail

inline ScenarioResult run_scenario(const ExperimentConfig& cfg,
                                   const Calibration& p, Scenario sc) {
  if (sc.regime == Regime::ConstrainedPlanner && sc.xi < 0.0)
    sc = Scenario::constrained(p.gamma);  // uniform redistribution
  ScenarioResult r;
  r.scenario = sc;
  try {
    r.ss = solve_steady_state(sc, p);
    r.policy = solve_policy(sc, p, r.ss, cfg.order);
    Eigen::MatrixXd paths = simulate_pruned(sc, p, r.policy, cfg.horizon,
                                            cfg.burn_in, cfg.seed);
    Eigen::VectorXd sss = stochastic_steady_state(sc, p, r.policy);
    r.report = moments(sc, paths, sss);
    r.irf = cfg.girf ? girf(sc, p, r.policy, cfg.shock_sds, cfg.irf_horizon,
                            cfg.girf_replications, cfg.seed + 1)
                     : irf(sc, p, r.policy, cfg.shock_sds, cfg.irf_horizon);
    r.audit = identity_audit(sc, p, paths);
    r.mean_rows = ref::mean_rows(p, paths);
    r.std_rows = ref::std_rows(r.report);
    r.ok = true;
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                       const std::string& outdir = "") {
  ExperimentResult res;
  res.config = cfg;
  if (res.config.scenarios.empty()) res.config.scenarios = default_scenarios();
  res.calib = build_calibration(cfg.preset, cfg.overrides);
  for (const Scenario& sc : res.config.scenarios)
    res.scenarios.push_back(run_scenario(cfg, res.calib, sc));

  if (!outdir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(outdir);
    detail::write_table(outdir + "/means.csv", res.scenarios,
                        ref::kMeanRowNames, true);
    detail::write_std_table(outdir + "/stds.csv", res.scenarios);
    VariableLayout layout;
    for (const auto& s : res.scenarios)
      if (s.ok)
        detail::write_irf(outdir + "/irf_" + s.scenario.name() + ".csv",
                          layout, s.irf);

    std::ofstream man(outdir + "/manifest.txt", std::ios::binary);
    man << "experiment " << cfg.name << "\n"
        << "preset " << cfg.preset << "\n"
        << "seed " << cfg.seed << "\n"
        << "horizon " << cfg.horizon << "\n"
        << "burn_in " << cfg.burn_in << "\n"
        << "order " << cfg.order << "\n"
        << "shock_sds " << detail::fmt6(cfg.shock_sds) << "\n"
        << "girf " << (cfg.girf ? 1 : 0) << "\n";
    const Calibration& p = res.calib;
    man << "calibration gamma=" << detail::fmt6(p.gamma)
        << " beta=" << detail::fmt6(p.beta) << " sigma=" << detail::fmt6(p.sigma)
        << " chi=" << detail::fmt6(p.chi) << " alpha=" << detail::fmt6(p.alpha)
        << " delta=" << detail::fmt6(p.delta)
        << " eps_adj=" << detail::fmt6(p.eps_adj)
        << " rho_A=" << detail::fmt6(p.rho_A)
        << " sigma_eta=" << detail::fmt6(p.sigma_eta)
        << " eta=" << detail::fmt6(p.eta_pollution)
        << " theta1=" << detail::fmt6(p.theta1)
        << " theta2=" << detail::fmt6(p.theta2)
        << " phi1=" << detail::fmt6(p.phi1) << " phi2=" << detail::fmt6(p.phi2)
        << " xi=" << detail::fmt6(p.xi) << " A=" << detail::fmt6(p.A) << "\n";
    for (const auto& s : res.scenarios) {
      man << "scenario " << s.scenario.name() << " ";
      if (!s.ok) {
        man << "FAILED " << s.error << "\n";
        continue;
      }
      man << "ok ss_residual=" << detail::fmt6(s.ss.residual_norm)
          << " bk=" << (s.policy.blanchard_kahn_ok ? 1 : 0) << " eigenvalues=";
      for (int i = 0; i < (int)s.policy.eigenvalues.size(); ++i)
        man << (i ? ";" : "") << detail::fmt6(std::abs(s.policy.eigenvalues[i]));
      man << " audit=" << (s.audit.pass() ? "pass" : "FAIL") << "\n";
      for (const auto& w : s.policy.warnings) man << "warning " << w << "\n";
    }
  }
  return res;
}

// ---- comparison against the embedded targets ----

struct CellFailure {
  std::string row, column;
  double value{0.0}, target{0.0}, tolerance{0.0};
};

struct ComparisonReport {
  std::string preset, table;
  int cells_checked{0};
  std::vector<CellFailure> failures;
  bool pass() const { return failures.empty(); }
};

// Read a CSV written by run_experiment back into rows/columns.
inline std::map<std::string, std::map<std::string, double>> read_table_csv(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line))
    throw validation_error("empty table '" + path + "'");
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) parts.push_back(cell);
    return parts;
  };
  auto header = split(line);
  std::map<std::string, std::map<std::string, double>> table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto parts = split(line);
    if (parts.size() != header.size())
      throw validation_error("ragged row in '" + path + "'");
    for (std::size_t j = 1; j < parts.size(); ++j)
      table[parts[0]][header[j]] = std::strtod(parts[j].c_str(), nullptr);
  }
  return table;
}

inline ComparisonReport compare_to_reference(const std::string& bundle_dir,
                                             const std::string& which,
                                             const std::string& preset) {
  const bool means = which == "means";
  if (!means && which != "stds")
    throw validation_error("compare: table must be 'means' or 'stds'");
  const auto& tab = ref::table(preset);
  auto csv = read_table_csv(bundle_dir + "/" + which + ".csv");

  ComparisonReport rep;
  rep.preset = preset;
  rep.table = which;
  const int rows = means ? ref::kNumMeanRows : ref::kNumStdRows;
  const std::array<std::string, 5> cols = {
      "bau", "unconstrained", "constrained_xi0", "constrained_xigamma",
      "constrained_xi1"};
  for (int i = 0; i < rows; ++i) {
    const std::string& rname =
        means ? ref::kMeanRowNames[i] : ref::kStdRowNames[i];
    auto rit = csv.find(rname);
    if (rit == csv.end())
      throw validation_error("compare: missing row '" + rname + "'");
    for (int j = 0; j < ref::kNumScenarios; ++j) {
      auto cit = rit->second.find(cols[j]);
      if (cit == rit->second.end())
        throw validation_error("compare: missing column '" + cols[j] + "'");
      const double target = means ? tab.means(i, j) : tab.stds(i, j);
      const double tol = means ? ref::mean_tolerance(i, target, preset)
                               : ref::std_tolerance(target);
      ++rep.cells_checked;
      if (!(std::abs(cit->second - target) <= tol))
        rep.failures.push_back({rname, cols[j], cit->second, target, tol});
    }
  }
  return rep;
}

// ---- sensitivity suite ----

struct SensitivityResult {
  std::vector<std::string> presets;
  std::vector<bool> run_ok;
  std::vector<ComparisonReport> mean_reports, std_reports;
  bool pass() const {
    for (bool b : run_ok)
      if (!b) return false;
    for (const auto& r : mean_reports)
      if (!r.pass()) return false;
    for (const auto& r : std_reports)
      if (!r.pass()) return false;
    return true;
  }
};

inline SensitivityResult sensitivity_suite(const std::string& outdir,
                                           std::uint64_t seed = 20240101,
                                           long horizon = 100000,
                                           long burn_in = 1000) {
  SensitivityResult res;
  res.presets = {"gamma_low", "gamma_high", "theta1_high",
                 "sigma_low", "chi_high",  "eps_high"};
  for (const auto& preset : res.presets) {
    ExperimentConfig cfg;
    cfg.name = "sensitivity_" + preset;
    cfg.preset = preset;
    cfg.seed = seed;
    cfg.horizon = horizon;
    cfg.burn_in = burn_in;
    const std::string dir = outdir + "/" + preset;
    ExperimentResult run = run_experiment(cfg, dir);
    res.run_ok.push_back(run.all_ok());
    if (run.all_ok()) {
      res.mean_reports.push_back(compare_to_reference(dir, "means", preset));
      res.std_reports.push_back(compare_to_reference(dir, "stds", preset));
    } else {
      ComparisonReport stub;
      stub.preset = preset;
      stub.failures.push_back({"(run)", "(all)", 0, 0, 0});
      res.mean_reports.push_back(stub);
      res.std_reports.push_back(stub);
    }
  }
  return res;
}

}  // namespace ctax
