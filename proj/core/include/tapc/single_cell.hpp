#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace tapc {

// One cell in isolation: each user is characterized by the received
// noise-plus-interference density divided by its link gain (W/Hz, the price
// of one unit of SINR), a rate demand, and the shared bandwidth. power_cap
// bounds the summed time-averaged PSD and only matters to the rate maximizer.
//
// The same struct describes a cell embedded in a network: fold the current
// interference into noise_over_gain and the solvers apply unchanged.
struct SingleCellProblem {
  std::vector<double> noise_over_gain;  // per user, W/Hz, positive
  std::vector<double> demand_bps;       // per user, positive
  double bandwidth_hz = 0.0;
  double power_cap = std::numeric_limits<double>::infinity();  // W/Hz

  int user_count() const { return static_cast<int>(noise_over_gain.size()); }
  void validate() const;  // throws std::invalid_argument

  static SingleCellProblem from_gains(std::span<const double> gains,
                                      std::span<const double> demands, double noise_density,
                                      double bandwidth_hz,
                                      double power_cap = std::numeric_limits<double>::infinity());
};

struct SingleCellSolution {
  std::vector<double> load;       // time share per user, sums to one
  std::vector<double> avg_power;  // W/Hz per user
  std::vector<double> rate_bps;   // per user

  // Multipliers of the underlying optimality system, useful as diagnostics.
  // time_price is attached to the unit time budget in both solvers;
  // power_price and demand_price exist only for the rate maximizer.
  double time_price = std::numeric_limits<double>::quiet_NaN();
  double power_price = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> demand_price;

  enum class Mode { power_min, rate_boundary, rate_surplus };
  Mode mode = Mode::power_min;
  int surplus_user = -1;        // rate_surplus: the one user served above demand
  bool ties_perturbed = false;  // equal-quality users were nudged apart
  double residual = 0.0;        // |sum load - 1| or relative power budget residual

  double total_power() const;
  double sum_rate() const;
};

// Least total average power that meets every demand exactly. Always solvable:
// shrinking time shares buys arbitrary rate at exponential power cost, growing
// them toward the full budget minimizes it. Loads fill the time budget.
SingleCellSolution pm_sc(const SingleCellProblem& prob);

// Total power of the minimizer, the feasibility threshold for rate
// maximization under a power cap.
double min_power_of_demands(const SingleCellProblem& prob);

struct RmScResult {
  std::optional<SingleCellSolution> solution;
  double power_deficit = 0.0;  // W/Hz short of the cap when infeasible
  bool feasible() const { return solution.has_value(); }
};

// Largest sum rate under the power cap and the demands. Spends the whole
// power budget; every user except the single best-quality one is pinned at
// its demand, the best one absorbs the surplus. Degenerates to the power
// minimizer when the cap equals the minimum feasible power.
RmScResult rm_sc(const SingleCellProblem& prob);

// Largest relative stationarity residual of a rate_surplus solution across
// both first-order conditions and all users; a correctness diagnostic.
double rm_kkt_residual(const SingleCellProblem& prob, const SingleCellSolution& sol);

}  // namespace tapc
