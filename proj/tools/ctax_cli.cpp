// Command-line front end: run experiments, compute impulse responses, compare
// output bundles against the embedded reference tables, and run the
// sensitivity suite.
//
// Exit codes: 0 success, 1 solver failure, 2 configuration error,
// 3 comparison failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ctax/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolver = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCompare = 3;

std::string resolve_output(const std::string& dir) {
  std::filesystem::path p(dir);
  if (p.is_absolute()) return p.string();
  if (const char* root = std::getenv("CTAX_OUTPUT_ROOT"))
    return (std::filesystem::path(root) / p).string();
  return p.string();
}

struct RunFlags {
  std::string config_path;
  std::string outdir;
  // optional command-line overrides of the config file
  std::int64_t seed = -1;
  long horizon = -1;
  long burn_in = -1;
  double shock_sds = std::numeric_limits<double>::quiet_NaN();
  int order = 0;
  bool use_girf = false;

  ctax::ExperimentConfig load() const {
    ctax::ExperimentConfig cfg = ctax::load_config(config_path);
    if (seed >= 0) cfg.seed = (std::uint64_t)seed;
    if (horizon > 0) cfg.horizon = horizon;
    if (burn_in >= 0) cfg.burn_in = burn_in;
    if (!std::isnan(shock_sds)) cfg.shock_sds = shock_sds;
    if (order != 0) cfg.order = order;
    if (use_girf) cfg.girf = true;
    if (cfg.order != 1 && cfg.order != 2)
      throw ctax::validation_error("order must be 1 or 2");
    return cfg;
  }
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("config", f.config_path, "experiment config file")->required();
  cmd->add_option("--seed", f.seed, "RNG seed");
  cmd->add_option("--horizon", f.horizon, "simulation horizon");
  cmd->add_option("--burn-in", f.burn_in, "discarded initial periods");
  cmd->add_option("--shock-sds", f.shock_sds, "impulse size in shock s.d.");
  cmd->add_option("--order", f.order, "approximation order (1 or 2)")
      ->check(CLI::IsMember({1, 2}));
  cmd->add_flag("--girf", f.use_girf, "ensemble-averaged impulse responses");
}

int do_run(const RunFlags& flags, bool irf_only) {
  ctax::ExperimentConfig cfg = flags.load();
  const std::string out =
      resolve_output(flags.outdir.empty() ? cfg.name : flags.outdir);
  if (irf_only) {
    // skip the long simulation: IRFs only need policy functions
    cfg.horizon = 1;
    cfg.burn_in = 0;
  }
  ctax::ExperimentResult res = ctax::run_experiment(cfg, out);
  for (const auto& s : res.scenarios) {
    if (s.ok)
      std::cout << s.scenario.name() << ": ok (steady-state residual "
                << ctax::detail::fmt6(s.ss.residual_norm) << ")\n";
    else
      std::cerr << s.scenario.name() << ": FAILED: " << s.error << "\n";
  }
  std::cout << "output written to " << out << "\n";
  return res.all_ok() ? kExitOk : kExitSolver;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-agent climate RBC model: solve, simulate, compare"};
  app.require_subcommand(1);

  RunFlags run_flags, irf_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "run a full experiment");
  add_run_flags(run_cmd, run_flags);
  run_cmd->add_option("-o,--output", run_flags.outdir,
                      "output directory (relative paths resolve against "
                      "CTAX_OUTPUT_ROOT)");

  CLI::App* irf_cmd =
      app.add_subcommand("irf", "compute impulse responses only");
  add_run_flags(irf_cmd, irf_flags);
  irf_cmd->add_option("-o,--output", irf_flags.outdir, "output directory");

  std::string bundle, table = "means", preset = "baseline";
  CLI::App* cmp_cmd =
      app.add_subcommand("compare", "compare a bundle to the reference tables");
  cmp_cmd->add_option("bundle", bundle, "directory written by 'run'")
      ->required();
  cmp_cmd->add_option("--table", table, "means or stds")
      ->check(CLI::IsMember({"means", "stds"}));
  cmp_cmd->add_option("--preset", preset, "calibration preset");

  std::string sens_outdir;
  std::uint64_t sens_seed = 20240101;
  long sens_horizon = 100000, sens_burn_in = 1000;
  CLI::App* sens_cmd =
      app.add_subcommand("sensitivity", "run the six-variant sensitivity suite");
  sens_cmd->add_option("outdir", sens_outdir, "output directory")->required();
  sens_cmd->add_option("--seed", sens_seed, "RNG seed");
  sens_cmd->add_option("--horizon", sens_horizon, "simulation horizon");
  sens_cmd->add_option("--burn-in", sens_burn_in, "discarded initial periods");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return do_run(run_flags, false);
    if (irf_cmd->parsed()) return do_run(irf_flags, true);
    if (cmp_cmd->parsed()) {
      ctax::ComparisonReport rep =
          ctax::compare_to_reference(resolve_output(bundle), table, preset);
      std::cout << rep.table << " vs preset '" << rep.preset << "': "
                << rep.cells_checked << " cells, " << rep.failures.size()
                << " out of tolerance\n";
      for (const auto& f : rep.failures)
        std::cout << "  " << f.row << " / " << f.column << ": got "
                  << ctax::detail::fmt6(f.value) << ", expected "
                  << ctax::detail::fmt6(f.target) << " +/- "
                  << ctax::detail::fmt6(f.tolerance) << "\n";
      return rep.pass() ? kExitOk : kExitCompare;
    }
    if (sens_cmd->parsed()) {
      ctax::SensitivityResult res = ctax::sensitivity_suite(
          resolve_output(sens_outdir), sens_seed, sens_horizon, sens_burn_in);
      for (std::size_t i = 0; i < res.presets.size(); ++i) {
        std::cout << res.presets[i] << ": "
                  << (res.run_ok[i] ? "run ok" : "run FAILED") << ", means "
                  << res.mean_reports[i].failures.size() << " off, stds "
                  << res.std_reports[i].failures.size() << " off\n";
      }
      return res.pass() ? kExitOk : kExitCompare;
    }
  } catch (const ctax::validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitConfig;
}
