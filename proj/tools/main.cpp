#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "tapc/experiment.hpp"

namespace {

// Flags shared by every subcommand; set ones override the config file.
struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<std::string> algo;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_dir, "output directory (default: out)");
  cmd->add_option("--seed", args.seed, "scenario seed override");
  cmd->add_option("--tol", args.tol, "convergence tolerance override");
  cmd->add_option("--max-iter", args.max_iter, "iteration limit override");
  cmd->add_option("--algo", args.algo, "pm-sc|rm-sc|dtapc-pm|dtapc-rm|opv-pm");
}

int load_config(const CommonArgs& args, tapc::ExperimentConfig& cfg) {
  try {
    if (!args.config_path.empty())
      cfg = tapc::load_experiment_config_file(args.config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return tapc::exit_config_error;
  }
  if (args.seed) cfg.scenario.seed = *args.seed;
  if (args.tol) cfg.tol = *args.tol;
  if (args.max_iter) cfg.max_iter = *args.max_iter;
  if (args.algo) {
    const auto parsed = tapc::parse_algo(*args.algo);
    if (!parsed) {
      std::cerr << "config error: unknown algorithm '" << *args.algo << "'\n";
      return tapc::exit_config_error;
    }
    cfg.algo = *parsed;
  }
  return tapc::exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"joint time-allocation and power-control experiments on "
               "interference-coupled cellular downlinks"};
  app.require_subcommand(1);

  CommonArgs run_args, sweep_args, check_args;
  CLI::App* run =
      app.add_subcommand("run", "solve one scenario and write the schedule");
  add_common(run, run_args);
  CLI::App* sweep =
      app.add_subcommand("sweep", "solve a demand sweep across algorithms");
  add_common(sweep, sweep_args);
  CLI::App* check =
      app.add_subcommand("check", "run property diagnostics on a scenario");
  add_common(check, check_args);

  CLI11_PARSE(app, argc, argv);

  try {
    tapc::ExperimentConfig cfg;
    if (run->parsed()) {
      if (const int rc = load_config(run_args, cfg)) return rc;
      return tapc::cmd_run(cfg, run_args.out_dir, std::cout);
    }
    if (sweep->parsed()) {
      if (const int rc = load_config(sweep_args, cfg)) return rc;
      return tapc::cmd_sweep(cfg, sweep_args.out_dir, std::cout);
    }
    if (check->parsed()) {
      if (const int rc = load_config(check_args, cfg)) return rc;
      return tapc::cmd_check(cfg, check_args.out_dir, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return tapc::exit_internal_error;
  }
  return tapc::exit_ok;
}
