#include <CLI11.hpp>

#include <iostream>
#include <thread>

#include "accurt/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace accurt::cli;
  CLI::App app{"Restarted shift-and-invert Krylov evaluation of exp(-tA)v"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  bool strict = false;
  std::optional<double> gamma;
  std::optional<long long> steps;
  std::optional<long long> samples;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value configuration file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_flag("--strict", strict, "sequential sparse products, bit-reproducible output");
    sub->add_option("--gamma", gamma, "initial shift, overrides gamma0 and curve_gamma");
  };
  CLI::App* run = app.add_subcommand("run", "run the configured method");
  CLI::App* curve = app.add_subcommand("curve", "write the residual curve of one Arnoldi run");
  CLI::App* exp = app.add_subcommand("export", "write the problem matrix in Matrix Market format");
  CLI::App* verify = app.add_subcommand("verify", "run and check against a reference solution");
  for (CLI::App* sub : {run, curve, exp, verify}) add_common(sub);
  curve->add_option("--steps", steps, "Arnoldi steps");
  curve->add_option("--samples", samples, "sample points");

  CLI11_PARSE(app, argc, argv);

  accurt::set_spmv_threads(strict ? 1u : std::max(1u, std::thread::hardware_concurrency()));

  RunConfig config;
  try {
    config = load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  if (gamma) {
    config.solver.gamma0 = *gamma;
    config.curve_gamma = *gamma;
  }
  if (steps) config.curve_steps = *steps;
  if (samples) config.curve_samples = *samples;

  if (run->parsed()) return cmd_run(config, out_dir, std::cout, std::cerr);
  if (curve->parsed()) return cmd_residual_curve(config, out_dir, std::cout, std::cerr);
  if (exp->parsed()) return cmd_export_matrix(config, out_dir, std::cout, std::cerr);
  return cmd_verify(config, out_dir, std::cout, std::cerr);
}
