#include <gtest/gtest.h>

#include "qwhydro/cli_io.hpp"
#include "small_configs.hpp"

using namespace qwhydro;
using namespace qwhydro::cli;
namespace fs = std::filesystem;

namespace {

const char* kThreeMode =
    "# three-mode shock, u_max = 0.1\n"
    "experiment = dtqw_shock\n"
    "n_sites = 4096\n"
    "mass = 512\n"
    "q_max = 51.2\n"
    "mode = 1, 1, 0\n"
    "mode = 0.3333333333333333, 3, 0\n"
    "mode = 0.5, 2, 0.9\n";

std::string read(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("qwhydro_test_" + name);
  fs::remove_all(d);
  return d;
}

std::string expect_config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  ADD_FAILURE() << "no ConfigError for:\n" << text;
  return "";
}

}  // namespace

TEST(ParseConfig, ThreeModeShock) {
  const SimConfig c = parse_config(kThreeMode);
  EXPECT_EQ(c.experiment, Experiment::dtqw_shock);
  EXPECT_EQ(c.n_sites, 4096u);
  EXPECT_EQ(c.mass, 512.0);
  EXPECT_EQ(c.q_max, 51.2);
  ASSERT_EQ(c.modes.size(), 3u);
  EXPECT_EQ(c.modes[1].wavenumber, 3);
  EXPECT_NEAR(c.modes[1].amplitude, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(c.modes[2].phase_offset, 0.9);
  // default horizon: 1.5 × m/q_max
  EXPECT_NEAR(c.t_final, 15.0, 1e-12);
  EXPECT_EQ(c.tolerances.at("norm_drift"), 1e-12);
}

TEST(ParseConfig, Errors) {
  EXPECT_NE(expect_config_error("experiment = validation\nn_sites = 64\n").find("mass"),
            std::string::npos);
  EXPECT_NE(expect_config_error("experiment = validation\nn_sites = 4095\nmass = 1\n").find("even"),
            std::string::npos);
  const std::string typo = expect_config_error("experiment = validation\nmas = 1\n");
  EXPECT_NE(typo.find("line 2"), std::string::npos);
  EXPECT_NE(typo.find("mas"), std::string::npos);
  EXPECT_NE(expect_config_error("experiment = validation\nmass = 1\nmass = 2\n").find("duplicate"),
            std::string::npos);
  expect_config_error("experiment = nope\nmass = 1\n");
  expect_config_error("experiment = validation\nn_sites = 64\nmass = abc\n");
  expect_config_error("experiment = validation\nn_sites = 64\nmass = 1\ntolerance.bogus = 1\n");
  expect_config_error("experiment = validation\nn_sites = 64\nmass = 1\nt_final = -1\n");
  expect_config_error(std::string(kThreeMode) + "snapshot_times = 20\n");
  expect_config_error("experiment = dtqw_shock\nn_sites = 64\nmass = 8\nq_max = 1\nmode = 1,2\n");
  expect_config_error("experiment = dtqw_shock\nn_sites = 64\nmass = 8\nq_max = 1\nmode = 1,40,0\n");
  expect_config_error("experiment = dtqw_planewave\nn_sites = 64\nmass = 8\nq = 0.5\nn_steps = 3\n");
  expect_config_error("experiment = pearcey_map\nmass = 20\nt_min = 0\n");
}

TEST(ParseConfig, ToleranceOverride) {
  const SimConfig c =
      parse_config("experiment = validation\nn_sites = 64\nmass = 1\ntolerance.roundtrip = 1e-9\n");
  EXPECT_EQ(c.tolerances.at("roundtrip"), 1e-9);
  EXPECT_EQ(c.tolerances.at("pearcey"), default_tolerances().at("pearcey"));
}

TEST(EmitCsv, RealGrid) {
  const fs::path d = scratch("csv");
  const SpacetimeGrid g{{0.0, 0.5}, {1.0, 2.0}, {1.0, 2.0, 3.0, 0.1}};
  emit_spacetime_csv(g, d / "g.csv");
  EXPECT_EQ(read(d / "g.csv"),
            "t,x,value\n1,0,1\n1,0.5,2\n2,0,3\n2,0.5,0.10000000000000001\n");
  const SpacetimeGrid bad{{0.0}, {1.0}, {1.0, 2.0}};
  EXPECT_THROW(emit_spacetime_csv(bad, d / "bad.csv"), Error);
}

TEST(EmitCsv, ComplexGrid) {
  const fs::path d = scratch("ccsv");
  const ComplexSpacetimeGrid g{{0.25}, {3.0}, {Complex(1.0, -2.0)}};
  emit_spacetime_csv(g, d / "c.csv");
  EXPECT_EQ(read(d / "c.csv"), "t,x,re,im\n3,0.25,1,-2\n");
}

TEST(RunExperiment, EveryExperimentDeterministic) {
  for (const auto& [name, text] : qwtest::small_configs()) {
    std::vector<std::map<std::string, std::string>> runs;
    for (int k = 0; k < 2; ++k) {
      const fs::path d = scratch(name + std::to_string(k));
      SimConfig c = parse_config(text + "output_dir = " + d.string() + "\n");
      const RunResult r = run_experiment(c);
      EXPECT_TRUE(r.ok) << name;
      std::map<std::string, std::string> files;
      for (const auto& p : r.outputs)
        if (p.extension() == ".csv") files[p.filename().string()] = read(p);
      EXPECT_FALSE(files.empty()) << name;
      EXPECT_TRUE(fs::exists(d / "manifest.json")) << name;
      runs.push_back(files);
    }
    EXPECT_EQ(runs[0], runs[1]) << name;
  }
}

TEST(RunExperiment, PlaneWaveManifest) {
  const fs::path d = scratch("pw");
  const SimConfig c = parse_config(
      "experiment = dtqw_planewave\nn_sites = 4096\nmass = 512\nq = 0\nn_steps = 10000\n"
      "frames = 3\nx_stride = 512\noutput_dir = " + d.string() + "\n");
  const RunResult r = run_experiment(c);
  EXPECT_TRUE(r.ok);
  const auto m = nlohmann::json::parse(read(d / "manifest.json"));
  EXPECT_LE(m["diagnostics"]["max_norm_drift"].get<double>(), 1e-12);
  EXPECT_TRUE(m["diagnostics"]["residual_monotone"].get<bool>());
  EXPECT_TRUE(m["diagnostics"].contains("fitted_order"));
  EXPECT_EQ(m["config"]["n_sites"], 4096);
  EXPECT_EQ(m["status"], "ok");
}

TEST(RunExperiment, SnapshotTimesRoundDown) {
  const fs::path d = scratch("snap");
  const SimConfig c = parse_config(
      "experiment = dtqw_shock\nn_sites = 64\nmass = 4\nq_max = 1\nmode = 1,1,0\n"
      "t_final = 1\nsnapshot_times = 0.5\noutput_dir = " + d.string() + "\n");
  run_experiment(c);
  const auto m = nlohmann::json::parse(read(d / "manifest.json"));
  const double eps = kTwoPi / 64;
  EXPECT_EQ(m["times"][0]["step"], 5);
  EXPECT_NEAR(m["times"][0]["realized"].get<double>(), 5 * eps, 1e-15);
  EXPECT_EQ(m["times"][0]["requested"], 0.5);
}

TEST(RunExperiment, ToleranceViolationFails) {
  const fs::path d = scratch("fail");
  const SimConfig c = parse_config("experiment = validation\nn_sites = 64\nmass = 8\n"
                                   "tolerance.pearcey = 1e-30\noutput_dir = " + d.string() + "\n");
  const RunResult r = run_experiment(c);
  EXPECT_FALSE(r.ok);
  EXPECT_FALSE(r.failures.empty());
  const auto m = nlohmann::json::parse(read(d / "manifest.json"));
  EXPECT_EQ(m["status"], "failed");
}

TEST(RunExperiment, SchrodingerShockOutputs) {
  const fs::path d = scratch("fig3");
  const SimConfig c = parse_config(qwtest::small_configs()[2].second + "output_dir = " + d.string() + "\n");
  const RunResult r = run_experiment(c);
  EXPECT_TRUE(r.ok);
  const auto m = nlohmann::json::parse(read(d / "manifest.json"));
  EXPECT_LE(m["diagnostics"]["bessel_oracle_max_diff"].get<double>(), 1e-9);
  // 3 times × 256 strided sites + header
  std::ifstream f(d / "velocity.csv");
  std::size_t lines = 0;
  for (std::string s; std::getline(f, s);) ++lines;
  EXPECT_EQ(lines, 3u * 256u + 1u);
}

TEST(Experiments, ListedNames) {
  std::vector<std::string> names;
  for (const auto& e : experiments()) names.push_back(e.name);
  EXPECT_EQ(names, (std::vector<std::string>{"dtqw_shock", "dtqw_planewave", "schrodinger_shock",
                                             "pearcey_map", "asymptotic_zones", "nonrel_compare",
                                             "validation"}));
}
