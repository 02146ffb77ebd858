#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ctax/experiment.hpp"
#include "ctax/reference.hpp"

using namespace ctax;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct TempDir {
  fs::path path;
  TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("ctax_test_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config defaults and full parse") {
  ExperimentConfig d = parse("");
  CHECK(d.preset == "baseline");
  CHECK(d.horizon == 100000);
  CHECK(d.order == 2);
  CHECK(d.scenarios.size() == 5);

  ExperimentConfig c = parse(
      "# comment lines are ignored\n"
      "name = smoke\n"
      "preset = gamma_high\n"
      "seed = 99\n"
      "horizon = 5000\n"
      "burn_in = 100\n"
      "order = 1\n"
      "irf_horizon = 50\n"
      "shock_sds = 2.5\n"
      "girf = 1\n"
      "girf_replications = 10\n"
      "[overrides]\n"
      "beta = 0.99  # trailing comment\n"
      "[scenarios]\n"
      "bau\n"
      "constrained_xi=0.5\n");
  CHECK(c.name == "smoke");
  CHECK(c.preset == "gamma_high");
  CHECK(c.seed == 99);
  CHECK(c.horizon == 5000);
  CHECK(c.order == 1);
  CHECK(c.shock_sds == 2.5);
  CHECK(c.girf);
  CHECK(c.overrides.at("beta") == 0.99);
  REQUIRE(c.scenarios.size() == 2);
  CHECK(c.scenarios[0].name() == "bau");
  CHECK(c.scenarios[1].xi == 0.5);
}

TEST_CASE("config rejects malformed input") {
  CHECK_THROWS_AS(parse("bogus_key = 1\n"), validation_error);
  CHECK_THROWS_AS(parse("[made_up_section]\n"), validation_error);
  CHECK_THROWS_AS(parse("horizon = soon\n"), validation_error);
  CHECK_THROWS_AS(parse("horizon\n"), validation_error);
  CHECK_THROWS_AS(parse("[scenarios]\nmystery\n"), validation_error);
  CHECK_THROWS_AS(parse("order = 3\n"), validation_error);
  CHECK_THROWS_AS(parse("horizon = 0\n"), validation_error);
  CHECK_THROWS_AS(parse("[overrides]\nnot_a_param = 1\n"), validation_error);
  CHECK_THROWS_AS(load_config("/no/such/file.cfg"), validation_error);
}

TEST_CASE("scenario names round-trip through the parser") {
  for (const char* n : {"bau", "unconstrained", "constrained_xi0",
                        "constrained_xigamma", "constrained_xi1"}) {
    CAPTURE(n);
    Scenario sc = scenario_from_name(n);
    if (std::string(n) != "constrained_xigamma") CHECK(sc.name() == n);
  }
  CHECK(scenario_from_name("constrained_uniform").xi == -1.0);
}

TEST_CASE("short experiment writes a readable bundle and reruns identically") {
  TempDir tmp("bundle");
  ExperimentConfig cfg;
  cfg.name = "short";
  cfg.horizon = 4000;
  cfg.burn_in = 200;
  cfg.irf_horizon = 20;
  cfg.scenarios = {Scenario::bau(), Scenario::unconstrained()};
  ExperimentResult r1 = run_experiment(cfg, (tmp.path / "a").string());
  REQUIRE(r1.all_ok());
  CHECK(fs::exists(tmp.path / "a" / "means.csv"));
  CHECK(fs::exists(tmp.path / "a" / "stds.csv"));
  CHECK(fs::exists(tmp.path / "a" / "irf_bau.csv"));
  CHECK(fs::exists(tmp.path / "a" / "manifest.txt"));

  // identical configuration, byte-identical tables
  run_experiment(cfg, (tmp.path / "b").string());
  for (const char* f : {"means.csv", "stds.csv", "irf_bau.csv",
                        "irf_unconstrained.csv"}) {
    CAPTURE(f);
    CHECK(slurp(tmp.path / "a" / f) == slurp(tmp.path / "b" / f));
  }

  // a different seed must move the sampled tables
  cfg.seed += 1;
  run_experiment(cfg, (tmp.path / "c").string());
  CHECK(slurp(tmp.path / "a" / "means.csv") !=
        slurp(tmp.path / "c" / "means.csv"));

  // read back: row/column access matches the in-memory result
  auto tbl = read_table_csv((tmp.path / "a" / "means.csv").string());
  const auto& bau = r1.scenarios[0];
  CHECK(tbl.at("Y_t").at("bau") ==
        doctest::Approx(bau.mean_rows(0)).epsilon(1e-5));
  CHECK(tbl.at("tau*_t").at("unconstrained") ==
        doctest::Approx(r1.scenarios[1].mean_rows(7)).epsilon(1e-4));
}

TEST_CASE("comparison flags doctored cells and missing files") {
  TempDir tmp("cmp");
  ExperimentConfig cfg;
  cfg.name = "cmp";
  cfg.horizon = 100000;
  cfg.burn_in = 1000;
  ExperimentResult r = run_experiment(cfg, (tmp.path / "run").string());
  REQUIRE(r.all_ok());
  ComparisonReport ok =
      compare_to_reference((tmp.path / "run").string(), "means", "baseline");
  CHECK(ok.pass());
  CHECK(ok.cells_checked == ref::kNumMeanRows * ref::kNumScenarios);

  // corrupt one cell well past its tolerance
  const fs::path means = tmp.path / "run" / "means.csv";
  std::string text = slurp(means);
  auto pos = text.find("\nY_t,");
  REQUIRE(pos != std::string::npos);
  auto comma = text.find(',', pos + 1);
  auto next = text.find(',', comma + 1);
  text.replace(comma + 1, next - comma - 1, "9.9");
  std::ofstream(means, std::ios::binary) << text;
  ComparisonReport bad =
      compare_to_reference((tmp.path / "run").string(), "means", "baseline");
  CHECK_FALSE(bad.pass());
  REQUIRE(bad.failures.size() == 1);
  CHECK(bad.failures[0].row == "Y_t");

  CHECK_THROWS_AS(
      compare_to_reference((tmp.path / "nowhere").string(), "means", "baseline"),
      validation_error);
  CHECK_THROWS_AS(
      compare_to_reference((tmp.path / "run").string(), "medians", "baseline"),
      validation_error);
}
