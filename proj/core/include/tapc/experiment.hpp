#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tapc/model.hpp"
#include "tapc/multi_cell_pm.hpp"
#include "tapc/multi_cell_rm.hpp"
#include "tapc/scenario_gen.hpp"

namespace tapc {

enum class Algo { pm_sc, rm_sc, dtapc_pm, dtapc_rm, opv_pm };

std::optional<Algo> parse_algo(const std::string& name);
std::string algo_name(Algo algo);
bool algo_is_single_cell(Algo algo);

// Everything one experiment needs: scenario source, solver choice and
// knobs, and the demand-sweep grid.
struct ExperimentConfig {
  ScenarioGenConfig scenario;   // geometry, demands, budgets, seed
  std::string scenario_file;    // when set, loaded instead of generated
  Algo algo = Algo::dtapc_pm;
  double tol = 1e-8;
  int max_iter = 10000;
  int max_sweeps = 500;
  int multistart = 8;
  double sweep_demand_from = 0.5e6;  // bit/s, applied uniformly to all users
  double sweep_demand_to = 2.5e6;
  int sweep_points = 5;
  std::vector<Algo> sweep_algos = {Algo::dtapc_pm, Algo::opv_pm, Algo::dtapc_rm};
  int threads = 0;  // sweep pool size; 0 picks one per hardware thread

  void validate() const;  // throws std::invalid_argument
};

// Parses `key = value` lines; '#' starts a comment. Throws ParseError
// (from the model serialization layer) with the offending line number on
// malformed input, unknown keys, or bad values.
ExperimentConfig load_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config_file(const std::string& path);

// The scenario an experiment runs on: loaded from scenario_file when set,
// generated from the embedded settings otherwise.
NetworkScenario build_scenario(const ExperimentConfig& cfg);

struct SweepRow {
  int index = 0;
  Algo algo = Algo::dtapc_pm;
  double demand_bps = 0.0;
  std::string status;
  double total_power_w = 0.0;
  double sum_rate_bps = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

// Solves every (algorithm, demand point) pair of the sweep grid on one shared
// scenario geometry. Jobs run on a bounded thread pool; rows come back in
// grid order regardless of scheduling, so output bytes never depend on it.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_pm_trace_csv(std::ostream& out, const PmResult& result);
void write_rm_trace_csv(std::ostream& out, const RmResult& result);

// Process exit codes shared by the subcommands.
inline constexpr int exit_ok = 0;
inline constexpr int exit_infeasible = 2;
inline constexpr int exit_property_violation = 3;
inline constexpr int exit_config_error = 64;
inline constexpr int exit_internal_error = 70;

// Subcommand bodies behind the command-line tool. Each writes its outputs
// under out_dir (created if missing), logs a human summary, and returns an
// exit code from the table above.
int cmd_run(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log);
int cmd_sweep(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log);
int cmd_check(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log);

}  // namespace tapc
