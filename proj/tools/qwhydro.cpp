// qwhydro run <config> | validate <config> | list-experiments
// Exit codes: 0 success, 2 invalid config, 1 any other error or a failed
// diagnostic check.

#include <iostream>

#include "CLI11.hpp"
#include "qwhydro/cli_io.hpp"

namespace cli = qwhydro::cli;

int main(int argc, char** argv) {
  CLI::App app{"quantum-walk hydrodynamics experiments"};
  app.require_subcommand(1);
  std::string config;
  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", config, "config file")->required();
  auto* validate = app.add_subcommand("validate", "parse and check a config file");
  validate->add_option("config", config, "config file")->required();
  auto* list = app.add_subcommand("list-experiments", "print the experiment names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (list->parsed()) {
      for (const auto& info : cli::experiments()) std::cout << info.name << "\t" << info.summary << "\n";
      return 0;
    }
    const cli::SimConfig cfg = cli::load_config(config);
    if (validate->parsed()) {
      std::cout << "ok: " << cli::experiment_name(cfg.experiment) << "\n";
      return 0;
    }
    const cli::RunResult r = cli::run_experiment(cfg);
    for (const auto& p : r.outputs) std::cout << p.string() << "\n";
    if (!r.ok) {
      for (const auto& f : r.failures) std::cerr << "check failed: " << f << "\n";
      return 1;
    }
    return 0;
  } catch (const cli::ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
