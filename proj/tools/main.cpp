#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "swsbp/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"One-dimensional shallow water solver on summation-by-parts bases"};
  app.require_subcommand(1);

  std::string config_path;
  std::string a1_range = "-3:0.1:3";
  std::string a2_range = "-3:0.1:3";

  auto* cmd_run = app.add_subcommand("run", "run one scenario and write csv/json outputs");
  cmd_run->add_option("config", config_path, "JSON configuration file")->required();

  auto* cmd_sweep = app.add_subcommand("sweep", "run a scenario over an (a1, a2) grid");
  cmd_sweep->add_option("config", config_path, "JSON configuration file")->required();
  cmd_sweep->add_option("--a1", a1_range, "a1 grid as lo:step:hi");
  cmd_sweep->add_option("--a2", a2_range, "a2 grid as lo:step:hi");

  auto* cmd_verify = app.add_subcommand("verify", "run the property suite");
  cmd_verify->add_option("config", config_path, "JSON configuration file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const swsbp::RunConfig cfg = swsbp::load_config(config_path);
    if (cmd_run->parsed()) return swsbp::run(cfg);
    if (cmd_sweep->parsed())
      return swsbp::sweep(cfg, swsbp::parse_range(a1_range), swsbp::parse_range(a2_range));
    return swsbp::verify(cfg);
  } catch (const swsbp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const swsbp::SolverAbort& e) {
    std::cerr << "solver abort: " << e.what() << "\n";
    return 2;
  }
}
