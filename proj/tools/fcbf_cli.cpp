#include <CLI11.hpp>

#include <iostream>

#include "fcbf/cli.hpp"

using namespace fcbf::cli;

int main(int argc, char** argv) {
  CLI::App app{"Filtered control barrier function experiments for a unicycle avoiding a disc"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "simulate one controller and write its trajectory CSV");
  run->add_option("--config", run_opts.config_path, "scenario file")->required();
  run->add_option("--controller", run_opts.controller, "fcbf | hocbf | sp-hocbf")
      ->required()
      ->check(CLI::IsMember({"fcbf", "hocbf", "sp-hocbf"}));
  run->add_option("--out", run_opts.out_csv, "trajectory CSV path")->required();
  run->add_option("--svg", run_opts.out_svg, "optional trajectory/input plot");
  run->add_option("--seed", run_opts.seed, "recorded in the manifest; runs are deterministic");
  run->add_flag("--record-timing", run_opts.record_timing, "fill the solve_time_s column");

  SweepOptions sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "run one scenario for several values of a parameter");
  sweep->add_option("--config", sweep_opts.config_path, "scenario file")->required();
  sweep->add_option("--param", sweep_opts.param, "k3 | alpha | tau | theta0")
      ->required()
      ->check(CLI::IsMember({"k3", "alpha", "tau", "theta0"}));
  sweep->add_option("--values", sweep_opts.values, "comma-separated values, e.g. 1,5 or pi/12,pi/6")
      ->required();
  sweep->add_option("--out-dir", sweep_opts.out_dir, "output directory")->required();
  sweep->add_option("--jobs", sweep_opts.jobs, "parallel runs")->check(CLI::PositiveNumber);
  sweep->add_flag("--record-timing", sweep_opts.record_timing, "fill the solve_time_s column");

  CompareOptions compare_opts;
  auto* compare = app.add_subcommand("compare", "tabulate and overlay trajectory CSVs");
  compare->add_option("csv", compare_opts.csvs, "two or more trajectory CSVs")->required();
  compare->add_option("--svg", compare_opts.out_svg, "optional overlay plot");

  VerifyOptions verify_opts;
  auto* verify = app.add_subcommand("verify", "finite-difference checks of every closed-form rate");
  verify->add_option("--config", verify_opts.config_path, "scenario file")->required();
  verify->add_option("--seed", verify_opts.seed, "sampling seed");
  verify->add_option("--samples", verify_opts.samples, "states per check (>= 100)")
      ->check(CLI::Range(100, 1000000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(run_opts, std::cout, std::cerr);
    if (*sweep) return cmd_sweep(sweep_opts, std::cout, std::cerr);
    if (*compare) return cmd_compare(compare_opts, std::cout, std::cerr);
    if (*verify) return cmd_verify(verify_opts, std::cout, std::cerr);
  } catch (const fcbf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}
