#include "tapc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tapc/baselines.hpp"
#include "tapc/model_io.hpp"
#include "tapc/single_cell.hpp"

namespace tapc {
namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double to_double(const std::string& tok, int line) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ParseError("bad number '" + tok + "'", line);
  return v;
}

int to_int(const std::string& tok, int line) {
  int v = 0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ParseError("bad integer '" + tok + "'", line);
  return v;
}

Algo to_algo(const std::string& tok, int line) {
  const auto algo = parse_algo(tok);
  if (!algo) throw ParseError("unknown algorithm '" + tok + "'", line);
  return *algo;
}

std::string status_name(PmStatus status) {
  switch (status) {
    case PmStatus::converged: return "solved";
    case PmStatus::infeasible_cap: return "infeasible-cap";
    case PmStatus::diverged: return "diverged";
    case PmStatus::no_convergence: return "no-convergence";
  }
  return "unknown";
}

std::string status_name(RmStatus status) {
  switch (status) {
    case RmStatus::converged: return "solved";
    case RmStatus::infeasible: return "infeasible";
    case RmStatus::no_convergence: return "no-convergence";
  }
  return "unknown";
}

PmOptions pm_options(const ExperimentConfig& cfg, bool record_trace) {
  PmOptions opts;
  opts.tol = cfg.tol;
  opts.max_iter = cfg.max_iter;
  opts.record_trace = record_trace;
  return opts;
}

RmOptions rm_options(const ExperimentConfig& cfg) {
  RmOptions opts;
  opts.tol = cfg.tol;
  opts.max_sweeps = cfg.max_sweeps;
  opts.multistart = cfg.multistart;
  opts.seed = cfg.scenario.seed;
  opts.pm = pm_options(cfg, false);
  return opts;
}

// Scatter a single-cell solution over the (only) cell of a scenario.
Allocation to_allocation(const NetworkScenario& sc, const SingleCellSolution& sol) {
  Allocation alloc;
  const auto& users = sc.cell_users[0];
  alloc.load.assign(sc.user_count(), 0.0);
  alloc.avg_power.assign(sc.user_count(), 0.0);
  alloc.rate_bps.assign(sc.user_count(), 0.0);
  for (std::size_t j = 0; j < users.size(); ++j) {
    alloc.load[users[j]] = sol.load[j];
    alloc.avg_power[users[j]] = sol.avg_power[j];
    alloc.rate_bps[users[j]] = sol.rate_bps[j];
  }
  return alloc;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << content;
}

SingleCellProblem single_cell_view(const NetworkScenario& sc) {
  return cell_subproblem(sc, 0, CellPowerVector(1, 0.0));
}

double total_power_w(const NetworkScenario& sc, const CellPowerVector& q) {
  return std::accumulate(q.begin(), q.end(), 0.0) * sc.bandwidth_hz;
}

SweepRow solve_sweep_row(const ExperimentConfig& cfg, const NetworkScenario& base,
                         int index, Algo algo, double demand) {
  NetworkScenario sc = base;
  for (double& d : sc.demand_bps) d = demand;

  SweepRow row;
  row.index = index;
  row.algo = algo;
  row.demand_bps = demand;

  switch (algo) {
    case Algo::pm_sc: {
      const SingleCellSolution sol = pm_sc(single_cell_view(sc));
      const bool fits = sol.total_power() <= sc.power_cap_density(0) * (1.0 + 1e-9);
      row.status = fits ? "solved" : "infeasible-cap";
      row.total_power_w = sol.total_power() * sc.bandwidth_hz;
      row.sum_rate_bps = sol.sum_rate();
      row.iterations = 1;
      break;
    }
    case Algo::rm_sc: {
      const RmScResult res = rm_sc(single_cell_view(sc));
      if (res.feasible()) {
        row.status = "solved";
        row.total_power_w = res.solution->total_power() * sc.bandwidth_hz;
        row.sum_rate_bps = res.solution->sum_rate();
        row.residual = res.solution->residual;
      } else {
        row.status = "infeasible";
      }
      row.iterations = 1;
      break;
    }
    case Algo::dtapc_pm:
    case Algo::opv_pm: {
      const PmResult res = algo == Algo::dtapc_pm ? dtapc_pm(sc, pm_options(cfg, false))
                                                  : opv_pm(sc, pm_options(cfg, false));
      row.status = status_name(res.status);
      row.iterations = res.iterations;
      row.residual = res.residual;
      if (res.feasible()) {
        row.total_power_w = total_power_w(sc, res.cell_power);
        row.sum_rate_bps = std::accumulate(res.allocation.rate_bps.begin(),
                                           res.allocation.rate_bps.end(), 0.0);
      }
      break;
    }
    case Algo::dtapc_rm: {
      const RmResult res = dtapc_rm(sc, rm_options(cfg));
      row.status = status_name(res.status);
      row.iterations = res.sweeps;
      if (res.trace.size() >= 2) {
        const double last = res.trace.back();
        const double prev = res.trace[res.trace.size() - 2];
        row.residual = std::abs(last - prev) / std::max(std::abs(last), 1e-300);
      }
      if (res.feasible()) {
        row.total_power_w = total_power_w(sc, res.cell_power);
        row.sum_rate_bps = res.sum_rate_bps;
      }
      break;
    }
  }
  return row;
}

}  // namespace

std::optional<Algo> parse_algo(const std::string& name) {
  if (name == "pm-sc") return Algo::pm_sc;
  if (name == "rm-sc") return Algo::rm_sc;
  if (name == "dtapc-pm") return Algo::dtapc_pm;
  if (name == "dtapc-rm") return Algo::dtapc_rm;
  if (name == "opv-pm") return Algo::opv_pm;
  return std::nullopt;
}

std::string algo_name(Algo algo) {
  switch (algo) {
    case Algo::pm_sc: return "pm-sc";
    case Algo::rm_sc: return "rm-sc";
    case Algo::dtapc_pm: return "dtapc-pm";
    case Algo::dtapc_rm: return "dtapc-rm";
    case Algo::opv_pm: return "opv-pm";
  }
  return "unknown";
}

bool algo_is_single_cell(Algo algo) {
  return algo == Algo::pm_sc || algo == Algo::rm_sc;
}

void ExperimentConfig::validate() const {
  if (scenario_file.empty()) scenario.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
  if (max_sweeps < 1) throw std::invalid_argument("max_sweeps must be at least 1");
  if (multistart < 1) throw std::invalid_argument("multistart must be at least 1");
  if (!(sweep_demand_from > 0.0) || !(sweep_demand_to >= sweep_demand_from))
    throw std::invalid_argument("sweep demand range must be positive and ordered");
  if (sweep_points < 1) throw std::invalid_argument("sweep_points must be at least 1");
  if (sweep_algos.empty()) throw std::invalid_argument("sweep_algos must not be empty");
  if (threads < 0) throw std::invalid_argument("threads must be non-negative");
}

ExperimentConfig load_experiment_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line_no);
    if (value.empty()) throw ParseError("empty value for '" + key + "'", line_no);

    if (key == "cells") cfg.scenario.cells = to_int(value, line_no);
    else if (key == "users_per_cell") cfg.scenario.users_per_cell = to_int(value, line_no);
    else if (key == "sectors_per_site") cfg.scenario.sectors_per_site = to_int(value, line_no);
    else if (key == "inter_site_m") cfg.scenario.inter_site_m = to_double(value, line_no);
    else if (key == "carrier_ghz") cfg.scenario.carrier_ghz = to_double(value, line_no);
    else if (key == "shadow_std_db") cfg.scenario.shadow_std_db = to_double(value, line_no);
    else if (key == "demand_bps") cfg.scenario.demand_bps = to_double(value, line_no);
    else if (key == "power_limit_w") cfg.scenario.power_limit_w = to_double(value, line_no);
    else if (key == "noise_dbm_hz") cfg.scenario.noise_dbm_hz = to_double(value, line_no);
    else if (key == "bandwidth_hz") cfg.scenario.bandwidth_hz = to_double(value, line_no);
    else if (key == "seed") cfg.scenario.seed = static_cast<std::uint64_t>(to_int(value, line_no));
    else if (key == "scenario_file") cfg.scenario_file = value;
    else if (key == "algo") cfg.algo = to_algo(value, line_no);
    else if (key == "tol") cfg.tol = to_double(value, line_no);
    else if (key == "max_iter") cfg.max_iter = to_int(value, line_no);
    else if (key == "max_sweeps") cfg.max_sweeps = to_int(value, line_no);
    else if (key == "multistart") cfg.multistart = to_int(value, line_no);
    else if (key == "sweep_demand_from") cfg.sweep_demand_from = to_double(value, line_no);
    else if (key == "sweep_demand_to") cfg.sweep_demand_to = to_double(value, line_no);
    else if (key == "sweep_points") cfg.sweep_points = to_int(value, line_no);
    else if (key == "threads") cfg.threads = to_int(value, line_no);
    else if (key == "sweep_algos") {
      cfg.sweep_algos.clear();
      std::string token;
      std::istringstream list(value);
      while (std::getline(list, token, ',')) {
        token = trim(token);
        if (token.empty()) throw ParseError("empty algorithm name in list", line_no);
        cfg.sweep_algos.push_back(to_algo(token, line_no));
      }
      if (cfg.sweep_algos.empty()) throw ParseError("empty algorithm list", line_no);
    } else {
      throw ParseError("unknown key '" + key + "'", line_no);
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), line_no);
  }
  return cfg;
}

ExperimentConfig load_experiment_config_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open config " + path);
  return load_experiment_config(is);
}

NetworkScenario build_scenario(const ExperimentConfig& cfg) {
  if (!cfg.scenario_file.empty()) return load_scenario_file(cfg.scenario_file);
  return generate_scenario(cfg.scenario);
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const NetworkScenario base = build_scenario(cfg);

  struct Job {
    int index;
    Algo algo;
    double demand;
  };
  std::vector<Job> jobs;
  int index = 0;
  for (Algo algo : cfg.sweep_algos) {
    for (int p = 0; p < cfg.sweep_points; ++p) {
      const double t = cfg.sweep_points == 1
                           ? 0.0
                           : static_cast<double>(p) / (cfg.sweep_points - 1);
      const double demand =
          cfg.sweep_demand_from + t * (cfg.sweep_demand_to - cfg.sweep_demand_from);
      jobs.push_back({index++, algo, demand});
    }
  }

  std::vector<SweepRow> rows(jobs.size());
  int pool = cfg.threads > 0 ? cfg.threads
                             : static_cast<int>(std::thread::hardware_concurrency());
  pool = std::clamp(pool, 1, static_cast<int>(jobs.size()));

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&]() {
    for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
      try {
        rows[i] = solve_sweep_row(cfg, base, jobs[i].index, jobs[i].algo, jobs[i].demand);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(pool);
  for (int t = 0; t < pool; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "# tapc-csv v1 sweep\n";
  out << "index,algo,demand_bps,status,total_power_w,sum_rate_bps,iterations,residual\n";
  for (const SweepRow& row : rows) {
    out << row.index << ',' << algo_name(row.algo) << ',' << num(row.demand_bps) << ','
        << row.status << ',' << num(row.total_power_w) << ',' << num(row.sum_rate_bps)
        << ',' << row.iterations << ',' << num(row.residual) << '\n';
  }
}

void write_pm_trace_csv(std::ostream& out, const PmResult& result) {
  out << "# tapc-csv v1 trace\n";
  out << "iteration,residual";
  const std::size_t n = result.cell_power.size();
  for (std::size_t i = 0; i < n; ++i) out << ",q_" << i;
  out << '\n';
  for (const PmTraceRow& row : result.trace) {
    out << row.iteration << ',' << num(row.residual);
    for (std::size_t i = 0; i < n; ++i) out << ',' << num(row.q[i]);
    out << '\n';
  }
}

void write_rm_trace_csv(std::ostream& out, const RmResult& result) {
  out << "# tapc-csv v1 rate-trace\n";
  out << "sweep,recorded_sum_rate_bps\n";
  for (std::size_t s = 0; s < result.trace.size(); ++s) {
    out << s << ',' << num(result.trace[s]) << '\n';
  }
}

int cmd_run(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log) {
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    log << "config error: " << e.what() << '\n';
    return exit_config_error;
  }

  NetworkScenario sc;
  try {
    sc = build_scenario(cfg);
  } catch (const std::exception& e) {
    log << "config error: " << e.what() << '\n';
    return exit_config_error;
  }
  if (algo_is_single_cell(cfg.algo) && sc.cell_count() != 1) {
    log << "config error: " << algo_name(cfg.algo) << " needs a 1-cell scenario, got "
        << sc.cell_count() << " cells\n";
    return exit_config_error;
  }

  std::filesystem::create_directories(out_dir);
  const std::string prefix = out_dir + "/";
  {
    std::ostringstream os;
    save_scenario(os, sc);
    write_file(prefix + "scenario.txt", os.str());
  }

  std::ostringstream summary;
  summary << "algo " << algo_name(cfg.algo) << '\n';
  int code = exit_ok;
  Allocation alloc;
  bool have_alloc = false;

  try {
    switch (cfg.algo) {
      case Algo::pm_sc: {
        const SingleCellSolution sol = pm_sc(single_cell_view(sc));
        alloc = to_allocation(sc, sol);
        have_alloc = true;
        const double cap = sc.power_cap_density(0);
        const bool fits = sol.total_power() <= cap * (1.0 + 1e-9);
        summary << "status " << (fits ? "solved" : "infeasible-cap") << '\n'
                << "total_power_w " << num(sol.total_power() * sc.bandwidth_hz) << '\n'
                << "sum_rate_bps " << num(sol.sum_rate()) << '\n'
                << "time_price " << num(sol.time_price) << '\n';
        if (!fits) code = exit_infeasible;
        break;
      }
      case Algo::rm_sc: {
        const RmScResult res = rm_sc(single_cell_view(sc));
        if (!res.feasible()) {
          summary << "status infeasible\n"
                  << "power_deficit_w_hz " << num(res.power_deficit) << '\n';
          code = exit_infeasible;
          break;
        }
        alloc = to_allocation(sc, *res.solution);
        have_alloc = true;
        summary << "status solved\n"
                << "total_power_w " << num(res.solution->total_power() * sc.bandwidth_hz)
                << '\n'
                << "sum_rate_bps " << num(res.solution->sum_rate()) << '\n'
                << "surplus_user "
                << (res.solution->surplus_user >= 0
                        ? sc.cell_users[0][res.solution->surplus_user]
                        : -1)
                << '\n';
        break;
      }
      case Algo::dtapc_pm:
      case Algo::opv_pm: {
        const PmResult res = cfg.algo == Algo::dtapc_pm
                                 ? dtapc_pm(sc, pm_options(cfg, true))
                                 : opv_pm(sc, pm_options(cfg, true));
        {
          std::ostringstream os;
          write_pm_trace_csv(os, res);
          write_file(prefix + "trace.csv", os.str());
        }
        summary << "status " << status_name(res.status) << '\n'
                << "iterations " << res.iterations << '\n'
                << "residual " << num(res.residual) << '\n';
        if (res.feasible()) {
          alloc = res.allocation;
          have_alloc = true;
          summary << "total_power_w " << num(total_power_w(sc, res.cell_power)) << '\n';
          for (std::size_t i = 0; i < res.cell_power.size(); ++i)
            summary << "cell_power_w_hz " << i << ' ' << num(res.cell_power[i]) << '\n';
        } else {
          code = res.status == PmStatus::no_convergence ? exit_internal_error
                                                        : exit_infeasible;
          for (int cell : res.violating_cells)
            summary << "violating_cell " << cell << '\n';
        }
        break;
      }
      case Algo::dtapc_rm: {
        const RmResult res = dtapc_rm(sc, rm_options(cfg));
        {
          std::ostringstream os;
          write_rm_trace_csv(os, res);
          write_file(prefix + "rate_trace.csv", os.str());
        }
        summary << "status " << status_name(res.status) << '\n'
                << "sweeps " << res.sweeps << '\n'
                << "start_used " << res.start_used << '\n';
        if (res.feasible()) {
          alloc = res.allocation;
          have_alloc = true;
          summary << "total_power_w " << num(total_power_w(sc, res.cell_power)) << '\n'
                  << "sum_rate_bps " << num(res.sum_rate_bps) << '\n'
                  << "full_load " << (res.full_load ? 1 : 0) << '\n';
          if (res.status == RmStatus::no_convergence) code = exit_internal_error;
        } else {
          code = exit_infeasible;
        }
        break;
      }
    }
  } catch (const std::exception& e) {
    log << "internal error: " << e.what() << '\n';
    return exit_internal_error;
  }

  if (have_alloc) {
    std::ostringstream os;
    save_allocation(os, alloc, sc);
    write_file(prefix + "allocation.txt", os.str());
  }
  write_file(prefix + "summary.txt", summary.str());
  log << summary.str();
  return code;
}

int cmd_sweep(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log) {
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    log << "config error: " << e.what() << '\n';
    return exit_config_error;
  }

  std::vector<SweepRow> rows;
  try {
    const NetworkScenario base = build_scenario(cfg);
    for (Algo algo : cfg.sweep_algos) {
      if (algo_is_single_cell(algo) && base.cell_count() != 1) {
        log << "config error: " << algo_name(algo) << " needs a 1-cell scenario, got "
            << base.cell_count() << " cells\n";
        return exit_config_error;
      }
    }
    rows = run_sweep(cfg);
  } catch (const ParseError& e) {
    log << "config error: " << e.what() << '\n';
    return exit_config_error;
  } catch (const std::exception& e) {
    log << "internal error: " << e.what() << '\n';
    return exit_internal_error;
  }

  std::filesystem::create_directories(out_dir);
  {
    std::ostringstream os;
    write_sweep_csv(os, rows);
    write_file(out_dir + "/sweep.csv", os.str());
  }

  bool all_solved = true;
  for (const SweepRow& row : rows) {
    log << row.index << ' ' << algo_name(row.algo) << " demand=" << num(row.demand_bps)
        << " status=" << row.status << " power_w=" << num(row.total_power_w)
        << " sum_rate=" << num(row.sum_rate_bps) << '\n';
    if (row.status != "solved") all_solved = false;
  }
  return all_solved ? exit_ok : exit_infeasible;
}

int cmd_check(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log) {
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    log << "config error: " << e.what() << '\n';
    return exit_config_error;
  }

  NetworkScenario sc;
  try {
    sc = build_scenario(cfg);
  } catch (const std::exception& e) {
    log << "config error: " << e.what() << '\n';
    return exit_config_error;
  }

  std::ostringstream report;
  int code = exit_ok;
  try {
    report << "cells " << sc.cell_count() << " users " << sc.user_count() << '\n';

    const InterferencePropertyReport axioms =
        interference_property_check(sc, cfg.scenario.seed);
    report << "axiom_samples " << axioms.samples << '\n'
           << "axiom_violations "
           << axioms.positivity_violations + axioms.monotonicity_violations +
                  axioms.scalability_violations
           << '\n'
           << "axiom_worst_margin " << num(axioms.worst_margin) << '\n';
    if (!axioms.ok()) code = exit_property_violation;

    const PmResult pm = dtapc_pm(sc, pm_options(cfg, false));
    report << "pm_status " << status_name(pm.status) << '\n';
    if (!pm.feasible()) {
      report << "check skipped: demands not servable\n";
      code = exit_infeasible;
    } else {
      const double gap = uniqueness_check(sc, 4, cfg.scenario.seed, pm_options(cfg, false));
      report << "uniqueness_gap " << num(gap) << '\n';
      if (gap > 1e-6) code = std::max(code, exit_property_violation);

      const ConstraintReport feas = validate_allocation(pm.allocation, sc, 1e-6);
      report << "allocation " << feas.describe() << '\n';
      if (!feas.ok()) code = std::max(code, exit_property_violation);
    }
  } catch (const std::exception& e) {
    log << "internal error: " << e.what() << '\n';
    return exit_internal_error;
  }

  std::filesystem::create_directories(out_dir);
  write_file(out_dir + "/check.txt", report.str());
  log << report.str();
  return code;
}

}  // namespace tapc
