#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tapc/model.hpp"
#include "tapc/multi_cell_pm.hpp"
#include "tapc/single_cell.hpp"

namespace tapc {

// Own-link gain over interference-plus-noise density at profile q; the user
// with the largest value in a cell is the natural surplus-rate candidate.
double effective_gain(const NetworkScenario& sc, const CellPowerVector& q, int user);

// Upper bound on cell `cell`'s average density such that no user of any other
// cell, keeping its current time share and average power, falls below its
// recorded rate. +infinity when no foreign user constrains the cell.
double coupled_power_cap(const NetworkScenario& sc, const Allocation& recorded,
                         const CellPowerVector& q, int cell);

struct RmOptions {
  double tol = 1e-8;      // relative recorded-sum-rate change between sweeps
  int max_sweeps = 500;
  int multistart = 8;     // independent starting profiles; best result kept
  std::uint64_t seed = 1;
  std::optional<CellPowerVector> initial_q;  // overrides the seeded profiles
  PmOptions pm;           // settings for the feasibility gate
};

enum class RmStatus { converged, no_convergence, infeasible };

struct RmResult {
  RmStatus status = RmStatus::infeasible;
  PmStatus pm_status = PmStatus::no_convergence;  // feasibility gate outcome
  Allocation allocation;       // final schedule; rate_bps holds re-measured rates
  CellPowerVector cell_power;
  double sum_rate_bps = 0.0;            // sum of re-measured rates
  double recorded_sum_rate_bps = 0.0;   // internal bookkeeping total
  int sweeps = 0;
  int start_used = -1;                  // index of the kept starting profile
  std::vector<double> trace;            // recorded network sum rate per sweep
  std::vector<SingleCellSolution::Mode> cell_mode;  // last per-cell update mode
  std::vector<int> surplus_user;        // per cell: network user id, -1 if none
  bool full_load = false;               // every cell schedules its whole slot

  bool feasible() const { return status != RmStatus::infeasible; }
};

// Distributed sum-rate maximisation under demand floors: cells take turns
// re-optimising their own schedule, each capped so that every other cell's
// recorded rates survive the change. Requires the demand profile to be
// servable at all (power-minimisation gate); infeasible otherwise.
RmResult dtapc_rm(const NetworkScenario& sc, const RmOptions& options = {});

}  // namespace tapc
