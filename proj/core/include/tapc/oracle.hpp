#pragma once

#include <optional>
#include <vector>

#include "tapc/single_cell.hpp"

namespace tapc {

// Reference answers computed by brute force, independent of the closed-form
// solvers: direct objective evaluation over load grids, one zoom stage around
// the incumbent. error_bound is a first-order estimate of how far the grid
// optimum can sit from the true one (gradient at the incumbent times the
// final cell diagonal); the objectives here are convex/concave, so it is a
// sound local estimate rather than a guess.
struct GridOracleResult {
  double objective = 0.0;        // total power (minimization) or sum rate (maximization)
  std::vector<double> load;
  std::vector<double> avg_power;
  double error_bound = 0.0;
};

// Exhaustive power minimization for up to 4 users: powers are eliminated by
// the demand equalities, loads swept over the full-time simplex.
GridOracleResult grid_oracle_pm_sc(const SingleCellProblem& prob, int grid_points = 200);

// Exhaustive rate maximization for up to 3 users: every user in turn plays
// the surplus role, the others are pinned at their demands, the remaining
// loads swept; the surplus user takes the leftover time and power.
GridOracleResult grid_oracle_rm_sc(const SingleCellProblem& prob, int grid_points = 200);

// Symmetric two-cell network, one user per cell, identical demand: the
// load-coupled fixed point collapses to one linear equation. Returns the
// per-cell average PSD, or nullopt when no finite fixed point exists
// (the cross-gain times the SINR target reaches the direct gain).
std::optional<double> analytic_2cell_fixed_point(double gain_direct, double gain_cross,
                                                 double demand_bps, double bandwidth_hz,
                                                 double noise_density);

}  // namespace tapc
