#pragma once

#include <vector>

#include "tapc/model.hpp"
#include "tapc/multi_cell_pm.hpp"
#include "tapc/single_cell.hpp"

namespace tapc {

// Uniform-PSD baseline for one cell: every user is served at the same
// spectral density, chosen so the time shares exactly fill the slot.
struct OpvCellResult {
  double serving_psd = 0.0;        // W/Hz while transmitting, same for all users
  std::vector<double> load;
  std::vector<double> avg_power;   // load * serving_psd per user
  bool stressed = false;           // slot cannot be filled below 1000x the cap

  double total_power() const;
};

// Requires a finite power cap (it bounds the search). The density solving
// the full-slot equation is unique because loads shrink as the PSD grows.
OpvCellResult per_cell_opv(const SingleCellProblem& prob);

// Fixed-point iteration of the uniform-PSD baseline across cells. Demands
// are met exactly by construction whenever the iteration converges within
// the power caps.
PmResult opv_pm(const NetworkScenario& sc, const PmOptions& options = {});

}  // namespace tapc
