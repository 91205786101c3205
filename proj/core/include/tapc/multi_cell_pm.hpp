#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "tapc/model.hpp"
#include "tapc/single_cell.hpp"

namespace tapc {

// Single-cell view of one cell given the other cells' average power
// densities: noise-plus-interference over gain per user, demands, cap.
SingleCellProblem cell_subproblem(const NetworkScenario& sc, int cell,
                                  const CellPowerVector& q);

enum class PmSchedule { jacobi, gauss_seidel };

struct PmOptions {
  double tol = 1e-8;               // relative l-inf change between sweeps
  int max_iter = 10000;
  PmSchedule schedule = PmSchedule::jacobi;
  double divergence_factor = 1e3;  // abort when q_i exceeds factor * cap_i
  std::optional<CellPowerVector> initial_q;  // default: per-cell caps
  bool record_trace = false;
};

enum class PmStatus { converged, infeasible_cap, diverged, no_convergence };

struct PmTraceRow {
  int iteration = 0;
  double residual = 0.0;
  CellPowerVector q;
};

struct PmResult {
  PmStatus status = PmStatus::no_convergence;
  Allocation allocation;
  CellPowerVector cell_power;      // converged per-cell average density
  std::vector<double> time_price;  // per-cell slot multiplier at the fix point
  int iterations = 0;
  double residual = std::numeric_limits<double>::infinity();
  std::vector<int> violating_cells;  // cells whose density exceeds their cap
  std::vector<PmTraceRow> trace;
  bool feasible() const { return status == PmStatus::converged; }
};

// Synchronous (or sweep-ordered) fixed-point driver over per-cell maps.
// cell_update(cell, q) returns the cell's new average power density.
// Fills status, cell_power, iterations, residual, violating_cells, trace;
// callers add the allocation via a final per-cell pass.
PmResult fixed_point_iterate(
    const NetworkScenario& sc,
    const std::function<double(int, const CellPowerVector&)>& cell_update,
    const PmOptions& options);

// Distributed power minimisation: every cell repeatedly re-solves its own
// minimum-power schedule against the latest interference profile.
PmResult dtapc_pm(const NetworkScenario& sc, const PmOptions& options = {});

struct InterferencePropertyReport {
  int samples = 0;
  int positivity_violations = 0;
  int monotonicity_violations = 0;
  int scalability_violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  bool ok() const {
    return positivity_violations == 0 && monotonicity_violations == 0 &&
           scalability_violations == 0;
  }
};

// Samples the per-cell minimum-power map and verifies it is a standard
// interference function: positive, monotone, and strictly sub-homogeneous.
// Margins more than rel_slack below zero count as violations.
InterferencePropertyReport interference_property_check(const NetworkScenario& sc,
                                                       std::uint64_t seed,
                                                       int samples = 200,
                                                       double rel_slack = 1e-10);

// Runs the fixed-point iteration from several starting profiles (all-zero,
// caps, then seeded uniform draws up to `inits` total) and reports the max
// pairwise relative l-inf gap between the resulting power profiles.
double uniqueness_check(const NetworkScenario& sc, int inits, std::uint64_t seed,
                        const PmOptions& options = {});

// Largest uniform multiplier on all demands that keeps the network
// solvable within the power caps, located by doubling + bisection.
double feasible_demand_scale(const NetworkScenario& sc, double rel_tol = 1e-3,
                             const PmOptions& options = {});

}  // namespace tapc
