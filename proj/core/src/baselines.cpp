#include "tapc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tapc/kernels.hpp"

namespace tapc {
namespace {

constexpr double ln2 = 0.6931471805599453;

// Total slot fraction needed when every user of the cell sees PSD `psd`.
double slot_fraction(const SingleCellProblem& prob, double psd) {
  double total = 0.0;
  for (int j = 0; j < prob.user_count(); ++j) {
    total += ln2 * prob.demand_bps[j] /
             (prob.bandwidth_hz * std::log1p(psd / prob.noise_over_gain[j]));
  }
  return total;
}

}  // namespace

double OpvCellResult::total_power() const {
  return std::accumulate(avg_power.begin(), avg_power.end(), 0.0);
}

OpvCellResult per_cell_opv(const SingleCellProblem& prob) {
  prob.validate();
  if (!std::isfinite(prob.power_cap))
    throw std::invalid_argument("per_cell_opv: power cap must be finite");

  const double hi = 1e3 * prob.power_cap;
  OpvCellResult result;
  if (slot_fraction(prob, hi) >= 1.0) {
    // Even an extreme density cannot fit the demands into the slot.
    result.serving_psd = hi;
    result.stressed = true;
  } else {
    Bracket bracket;
    bracket.lo = 1e-300;  // slot fraction diverges as the density vanishes
    bracket.hi = hi;
    bracket.max_expansions = 0;
    // The root can sit many decades below the cap, so an absolute argument
    // tolerance is meaningless here; run the bracket down to machine width.
    bracket.x_tol = 0.0;
    bracket.max_iter = 400;
    const auto root = bisect_monotone(
        [&prob](double psd) { return slot_fraction(prob, psd) - 1.0; }, bracket);
    if (!root) throw std::runtime_error("per_cell_opv: density search failed");
    result.serving_psd = *root;
  }

  result.load.resize(prob.user_count());
  result.avg_power.resize(prob.user_count());
  for (int j = 0; j < prob.user_count(); ++j) {
    result.load[j] = ln2 * prob.demand_bps[j] /
                     (prob.bandwidth_hz *
                      std::log1p(result.serving_psd / prob.noise_over_gain[j]));
    result.avg_power[j] = result.load[j] * result.serving_psd;
  }
  return result;
}

PmResult opv_pm(const NetworkScenario& sc, const PmOptions& options) {
  sc.validate();
  auto update = [&sc](int cell, const CellPowerVector& q) {
    return per_cell_opv(cell_subproblem(sc, cell, q)).total_power();
  };
  PmResult result = fixed_point_iterate(sc, update, options);
  if (result.status != PmStatus::converged) return result;

  const int users = sc.user_count();
  result.allocation.load.assign(users, 0.0);
  result.allocation.avg_power.assign(users, 0.0);
  result.allocation.rate_bps.assign(users, 0.0);
  for (int i = 0; i < sc.cell_count(); ++i) {
    const OpvCellResult cell = per_cell_opv(cell_subproblem(sc, i, result.cell_power));
    const auto& cell_users = sc.cell_users[i];
    for (std::size_t j = 0; j < cell_users.size(); ++j) {
      const int user = cell_users[j];
      result.allocation.load[user] = cell.load[j];
      result.allocation.avg_power[user] = cell.avg_power[j];
      result.allocation.rate_bps[user] = sc.demand_bps[user];
    }
  }
  return result;
}

}  // namespace tapc
