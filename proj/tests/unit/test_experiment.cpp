#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "tapc/experiment.hpp"
#include "tapc/model_io.hpp"

using tapc::Algo;
using tapc::ExperimentConfig;
using tapc::ParseError;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream is(text);
  return tapc::load_experiment_config(is);
}

// Small, comfortably feasible experiment used by the subcommand tests.
ExperimentConfig tiny_experiment() {
  ExperimentConfig cfg;
  cfg.scenario.cells = 3;
  cfg.scenario.users_per_cell = 2;
  cfg.scenario.demand_bps = 4e5;
  cfg.scenario.seed = 11;
  cfg.sweep_demand_from = 2e5;
  cfg.sweep_demand_to = 4e5;
  cfg.sweep_points = 3;
  return cfg;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

// Fresh output directory under the system temp root, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() / ("tapc_test_" + tag);
    std::filesystem::remove_all(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string str() const { return path.string(); }
};

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("an empty config stream yields the documented defaults") {
  const auto cfg = parse("");
  CHECK(cfg.scenario.cells == 15);
  CHECK(cfg.scenario.users_per_cell == 30);
  CHECK(cfg.scenario.bandwidth_hz == 18e6);
  CHECK(cfg.algo == Algo::dtapc_pm);
  CHECK(cfg.tol == 1e-8);
  CHECK(cfg.max_iter == 10000);
  CHECK(cfg.sweep_points == 5);
  CHECK(cfg.sweep_demand_from == 0.5e6);
  CHECK(cfg.sweep_demand_to == 2.5e6);
  REQUIRE(cfg.sweep_algos.size() == 3);
  CHECK(cfg.sweep_algos[0] == Algo::dtapc_pm);
  CHECK(cfg.sweep_algos[1] == Algo::opv_pm);
  CHECK(cfg.sweep_algos[2] == Algo::dtapc_rm);
  CHECK(cfg.threads == 0);
}

TEST_CASE("every key reaches its field") {
  const auto cfg = parse(
      "cells = 4\n"
      "users_per_cell = 3\n"
      "sectors_per_site = 1\n"
      "inter_site_m = 150\n"
      "carrier_ghz = 3.5\n"
      "shadow_std_db = 6\n"
      "demand_bps = 7e5   # trailing comment\n"
      "power_limit_w = 5\n"
      "noise_dbm_hz = -170\n"
      "bandwidth_hz = 2e7\n"
      "seed = 99\n"
      "algo = dtapc-rm\n"
      "tol = 1e-9\n"
      "max_iter = 500\n"
      "max_sweeps = 50\n"
      "multistart = 4\n"
      "sweep_demand_from = 1e5\n"
      "sweep_demand_to = 9e5\n"
      "sweep_points = 7\n"
      "threads = 2\n"
      "sweep_algos = dtapc-pm , dtapc-rm\n");
  CHECK(cfg.scenario.cells == 4);
  CHECK(cfg.scenario.users_per_cell == 3);
  CHECK(cfg.scenario.sectors_per_site == 1);
  CHECK(cfg.scenario.inter_site_m == 150.0);
  CHECK(cfg.scenario.carrier_ghz == 3.5);
  CHECK(cfg.scenario.shadow_std_db == 6.0);
  CHECK(cfg.scenario.demand_bps == 7e5);
  CHECK(cfg.scenario.power_limit_w == 5.0);
  CHECK(cfg.scenario.noise_dbm_hz == -170.0);
  CHECK(cfg.scenario.bandwidth_hz == 2e7);
  CHECK(cfg.scenario.seed == 99);
  CHECK(cfg.algo == Algo::dtapc_rm);
  CHECK(cfg.tol == 1e-9);
  CHECK(cfg.max_iter == 500);
  CHECK(cfg.max_sweeps == 50);
  CHECK(cfg.multistart == 4);
  CHECK(cfg.sweep_demand_from == 1e5);
  CHECK(cfg.sweep_demand_to == 9e5);
  CHECK(cfg.sweep_points == 7);
  CHECK(cfg.threads == 2);
  REQUIRE(cfg.sweep_algos.size() == 2);
  CHECK(cfg.sweep_algos[0] == Algo::dtapc_pm);
  CHECK(cfg.sweep_algos[1] == Algo::dtapc_rm);
}

TEST_CASE("parse failures carry the offending line") {
  const auto expect_line = [](const std::string& text, int line) {
    try {
      parse(text);
      FAIL_CHECK("expected a parse error for: " << text);
    } catch (const ParseError& e) {
      CHECK(e.line == line);
    }
  };
  expect_line("cells = 4\n\ntol 1e-8\n", 3);          // missing '='
  expect_line("cells = 4\nvolume = 11\n", 2);          // unknown key
  expect_line("cells = garbage\n", 1);                 // bad integer
  expect_line("tol = 1e-8x\n", 1);                     // trailing junk
  expect_line("cells =\n", 1);                         // empty value
  expect_line("= 4\n", 1);                             // empty key
  expect_line("algo = simplex\n", 1);                  // unknown algorithm
  expect_line("sweep_algos = dtapc-pm,,opv-pm\n", 1);  // empty list entry
  expect_line("cells = 4\ntol = -1\n", 2);             // validation failure
}

TEST_CASE("algorithm names round-trip") {
  for (Algo algo : {Algo::pm_sc, Algo::rm_sc, Algo::dtapc_pm, Algo::dtapc_rm,
                    Algo::opv_pm}) {
    const auto back = tapc::parse_algo(tapc::algo_name(algo));
    REQUIRE(back.has_value());
    CHECK(*back == algo);
  }
  CHECK_FALSE(tapc::parse_algo("pm_sc").has_value());
  CHECK(tapc::algo_is_single_cell(Algo::pm_sc));
  CHECK(tapc::algo_is_single_cell(Algo::rm_sc));
  CHECK_FALSE(tapc::algo_is_single_cell(Algo::dtapc_pm));
  CHECK_FALSE(tapc::algo_is_single_cell(Algo::dtapc_rm));
  CHECK_FALSE(tapc::algo_is_single_cell(Algo::opv_pm));
}

TEST_CASE("a run writes its outputs and reports success") {
  const auto cfg = tiny_experiment();
  TempDir dir("run");
  std::ostringstream log;
  const int code = tapc::cmd_run(cfg, dir.str(), log);
  CHECK(code == tapc::exit_ok);
  CHECK(std::filesystem::exists(dir.path / "scenario.txt"));
  CHECK(std::filesystem::exists(dir.path / "allocation.txt"));
  CHECK(std::filesystem::exists(dir.path / "summary.txt"));
  CHECK(std::filesystem::exists(dir.path / "trace.csv"));
  CHECK(read_file(dir.path / "summary.txt").find("status solved") != std::string::npos);
  CHECK(read_file(dir.path / "trace.csv").rfind("# tapc-csv v1 trace\n", 0) == 0);

  // The saved scenario reloads to the exact geometry the run used.
  const auto sc = tapc::load_scenario_file((dir.path / "scenario.txt").string());
  CHECK(sc.cell_count() == 3);
  sc.validate();
}

TEST_CASE("a maximizer run writes the rate trace") {
  auto cfg = tiny_experiment();
  cfg.algo = Algo::dtapc_rm;
  TempDir dir("run_rm");
  std::ostringstream log;
  const int code = tapc::cmd_run(cfg, dir.str(), log);
  CHECK(code == tapc::exit_ok);
  CHECK(read_file(dir.path / "rate_trace.csv").rfind("# tapc-csv v1 rate-trace\n", 0) == 0);
  CHECK(read_file(dir.path / "summary.txt").find("full_load 1") != std::string::npos);
}

TEST_CASE("an unservable run exits with the infeasibility code") {
  auto cfg = tiny_experiment();
  cfg.scenario.demand_bps = 1e9;
  TempDir dir("run_inf");
  std::ostringstream log;
  const int code = tapc::cmd_run(cfg, dir.str(), log);
  CHECK(code == tapc::exit_infeasible);
  CHECK_FALSE(std::filesystem::exists(dir.path / "allocation.txt"));
  CHECK(std::filesystem::exists(dir.path / "summary.txt"));
}

TEST_CASE("single-cell algorithms refuse multi-cell scenarios") {
  auto cfg = tiny_experiment();
  cfg.algo = Algo::rm_sc;
  TempDir dir("run_sc");
  std::ostringstream log;
  const int code = tapc::cmd_run(cfg, dir.str(), log);
  CHECK(code == tapc::exit_config_error);
  CHECK(log.str().find("1-cell") != std::string::npos);
}

TEST_CASE("a healthy network passes the property check command") {
  const auto cfg = tiny_experiment();
  TempDir dir("check");
  std::ostringstream log;
  const int code = tapc::cmd_check(cfg, dir.str(), log);
  CHECK(code == tapc::exit_ok);
  const auto report = read_file(dir.path / "check.txt");
  CHECK(report.find("axiom_violations 0") != std::string::npos);
  CHECK(report.find("pm_status solved") != std::string::npos);
  CHECK(report.find("uniqueness_gap") != std::string::npos);
}

TEST_CASE("sweep rows come back in grid order with exact endpoints") {
  auto cfg = tiny_experiment();
  cfg.sweep_algos = {Algo::dtapc_pm, Algo::opv_pm};
  const auto rows = tapc::run_sweep(cfg);
  REQUIRE(rows.size() == 6);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].index == static_cast<int>(i));
  }
  for (std::size_t i = 0; i < 3; ++i) CHECK(rows[i].algo == Algo::dtapc_pm);
  for (std::size_t i = 3; i < 6; ++i) CHECK(rows[i].algo == Algo::opv_pm);
  CHECK(rows[0].demand_bps == cfg.sweep_demand_from);
  CHECK(rows[1].demand_bps == 0.5 * (cfg.sweep_demand_from + cfg.sweep_demand_to));
  CHECK(rows[2].demand_bps == cfg.sweep_demand_to);
  for (const auto& row : rows) {
    CHECK(row.status == "solved");
    CHECK(row.total_power_w > 0.0);
  }
}

TEST_CASE("sweeps are byte-identical regardless of the thread pool") {
  auto cfg = tiny_experiment();
  cfg.threads = 4;
  const auto a = tapc::run_sweep(cfg);
  cfg.threads = 1;
  const auto b = tapc::run_sweep(cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].total_power_w == b[i].total_power_w);
    CHECK(a[i].sum_rate_bps == b[i].sum_rate_bps);
    CHECK(a[i].status == b[i].status);
  }
  std::ostringstream csv_a, csv_b;
  tapc::write_sweep_csv(csv_a, a);
  tapc::write_sweep_csv(csv_b, b);
  CHECK(csv_a.str() == csv_b.str());
  CHECK(csv_a.str().rfind("# tapc-csv v1 sweep\n", 0) == 0);
}

TEST_CASE("the sweep command writes the table and reports partial failures") {
  auto cfg = tiny_experiment();
  TempDir dir("sweep");
  std::ostringstream log;
  CHECK(tapc::cmd_sweep(cfg, dir.str(), log) == tapc::exit_ok);
  CHECK(read_file(dir.path / "sweep.csv").rfind("# tapc-csv v1 sweep\n", 0) == 0);

  // Stretch the grid past the feasibility edge: the table still appears but
  // the exit code flags the unsolved rows.
  cfg.sweep_demand_to = 1e9;
  TempDir dir2("sweep_inf");
  std::ostringstream log2;
  CHECK(tapc::cmd_sweep(cfg, dir2.str(), log2) == tapc::exit_infeasible);
  CHECK(std::filesystem::exists(dir2.path / "sweep.csv"));
}

TEST_CASE("a stored scenario file overrides generation") {
  const auto cfg = tiny_experiment();
  const auto sc = tapc::build_scenario(cfg);

  TempDir dir("scenario_file");
  std::filesystem::create_directories(dir.path);
  const auto path = (dir.path / "sc.txt").string();
  tapc::save_scenario_file(path, sc);

  ExperimentConfig from_file;
  from_file.scenario_file = path;
  const auto loaded = tapc::build_scenario(from_file);
  CHECK(loaded.cell_count() == sc.cell_count());
  CHECK(loaded.user_count() == sc.user_count());
  CHECK(loaded.gain == sc.gain);
  CHECK(loaded.demand_bps == sc.demand_bps);
}

}  // TEST_SUITE
