#include <CLI11.hpp>
#include <iostream>

#include "modad/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"modad: adaptive model/discretization error control for viscous conservation laws"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Run an experiment preset or a config file");
  std::string target;
  std::string reference = "on";
  int steps = -1;
  std::string out_dir;
  double theta = -1.0;
  run_cmd->add_option("target", target, "Preset name (test1, test2) or path to a key=value config")
      ->required();
  run_cmd->add_option("--reference", reference, "Run the full-model reference for the error column")
      ->check(CLI::IsMember({"on", "off"}));
  run_cmd->add_option("--steps", steps, "Override the number of timesteps");
  run_cmd->add_option("--out", out_dir, "Output directory");
  run_cmd->add_option("--theta", theta, "Doerfler bulk parameter override");

  CLI11_PARSE(app, argc, argv);

  try {
    modad::io::RunConfig cfg;
    if (target == "test1") cfg = modad::io::preset_test1();
    else if (target == "test2") cfg = modad::io::preset_test2();
    else cfg = modad::io::load_config(target);
    cfg.reference = (reference == "on");
    if (steps > 0) cfg.steps = steps;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (theta >= 0.0) cfg.theta = theta;
    return modad::io::run(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
