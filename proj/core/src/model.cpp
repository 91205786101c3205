#include "tapc/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tapc {

void NetworkScenario::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("scenario: " + what); };
  const int n = cell_count();
  const int u = user_count();
  if (n <= 0) fail("no cells");
  if (u <= 0) fail("no users");
  if (!(bandwidth_hz > 0.0)) fail("bandwidth must be positive");
  if (!(noise_density > 0.0)) fail("noise density must be positive");
  if (static_cast<int>(gain.size()) != n) fail("gain row count does not match cells");
  if (static_cast<int>(power_limit_w.size()) != n) fail("power limit count does not match cells");
  if (static_cast<int>(demand_bps.size()) != u) fail("demand count does not match users");

  std::vector<int> seen(u, 0);
  for (int i = 0; i < n; ++i) {
    if (cell_users[i].empty()) fail("cell " + std::to_string(i) + " has no users");
    if (!(power_limit_w[i] > 0.0)) fail("power limit of cell " + std::to_string(i));
    if (static_cast<int>(gain[i].size()) != u)
      fail("gain row " + std::to_string(i) + " does not match users");
    for (int j : cell_users[i]) {
      if (j < 0 || j >= u) fail("user id out of range in cell " + std::to_string(i));
      if (cell_of[j] != i) fail("association mismatch for user " + std::to_string(j));
      ++seen[j];
    }
    for (int j = 0; j < u; ++j) {
      if (!(gain[i][j] > 0.0))
        fail("gain from cell " + std::to_string(i) + " to user " + std::to_string(j) +
             " must be positive");
    }
  }
  for (int j = 0; j < u; ++j) {
    if (seen[j] != 1) fail("user " + std::to_string(j) + " not listed in exactly one cell");
    if (!(demand_bps[j] > 0.0)) fail("demand of user " + std::to_string(j) + " must be positive");
  }
}

double cell_power(const Allocation& alloc, const NetworkScenario& sc, int cell) {
  double sum = 0.0;
  for (int j : sc.cell_users[cell]) sum += alloc.avg_power[j];
  return sum;
}

CellPowerVector cell_powers(const Allocation& alloc, const NetworkScenario& sc) {
  CellPowerVector q(sc.cell_count());
  for (int i = 0; i < sc.cell_count(); ++i) q[i] = cell_power(alloc, sc, i);
  return q;
}

double interference_density(const NetworkScenario& sc, const CellPowerVector& q, int user) {
  const int serving = sc.cell_of[user];
  double sum = sc.noise_density;
  for (int k = 0; k < sc.cell_count(); ++k) {
    if (k != serving) sum += q[k] * sc.gain[k][user];
  }
  return sum;
}

double sinr(const Allocation& alloc, const NetworkScenario& sc, int user) {
  if (!(alloc.load[user] > 0.0)) return 0.0;
  const CellPowerVector q = cell_powers(alloc, sc);
  const double own = alloc.serving_power(user) * sc.gain[sc.cell_of[user]][user];
  return own / interference_density(sc, q, user);
}

double user_rate(const Allocation& alloc, const NetworkScenario& sc, int user) {
  if (!(alloc.load[user] > 0.0)) return 0.0;
  return sc.bandwidth_hz * alloc.load[user] * std::log2(1.0 + sinr(alloc, sc, user));
}

std::vector<double> user_rates(const Allocation& alloc, const NetworkScenario& sc) {
  const CellPowerVector q = cell_powers(alloc, sc);
  std::vector<double> rates(sc.user_count(), 0.0);
  for (int j = 0; j < sc.user_count(); ++j) {
    if (!(alloc.load[j] > 0.0)) continue;
    const double own = alloc.serving_power(j) * sc.gain[sc.cell_of[j]][j];
    rates[j] = sc.bandwidth_hz * alloc.load[j] *
               std::log2(1.0 + own / interference_density(sc, q, j));
  }
  return rates;
}

ConstraintReport validate_allocation(const Allocation& alloc, const NetworkScenario& sc,
                                     double tol) {
  ConstraintReport rep;
  rep.tolerance = tol;
  rep.min_load = 1.0;
  rep.min_avg_power = 0.0;

  const int u = sc.user_count();
  if (static_cast<int>(alloc.load.size()) != u ||
      static_cast<int>(alloc.avg_power.size()) != u ||
      static_cast<int>(alloc.rate_bps.size()) != u) {
    throw std::invalid_argument("allocation size does not match scenario");
  }

  // Loads are slot fractions, so an absolute tolerance fits them; powers span
  // many decades, so sign violations are judged against the serving cap.
  double worst_power_neg = 0.0;
  for (int j = 0; j < u; ++j) {
    rep.min_load = std::min(rep.min_load, alloc.load[j]);
    rep.min_avg_power = std::min(rep.min_avg_power, alloc.avg_power[j]);
    if (alloc.avg_power[j] < 0.0) {
      worst_power_neg = std::max(
          worst_power_neg, -alloc.avg_power[j] / sc.power_cap_density(sc.cell_of[j]));
    }
  }

  for (int i = 0; i < sc.cell_count(); ++i) {
    double load_sum = 0.0;
    for (int j : sc.cell_users[i]) load_sum += alloc.load[j];
    rep.worst_load_excess = std::max(rep.worst_load_excess, load_sum - 1.0);
    const double cap = sc.power_cap_density(i);
    rep.worst_power_excess =
        std::max(rep.worst_power_excess, (cell_power(alloc, sc, i) - cap) / cap);
  }

  const std::vector<double> actual = user_rates(alloc, sc);
  for (int j = 0; j < u; ++j) {
    const double d = sc.demand_bps[j];
    rep.worst_demand_shortfall = std::max(rep.worst_demand_shortfall, (d - actual[j]) / d);
    rep.worst_rate_mismatch =
        std::max(rep.worst_rate_mismatch, std::abs(alloc.rate_bps[j] - actual[j]) / d);
  }

  rep.load_ok = rep.worst_load_excess <= tol;
  rep.power_ok = rep.worst_power_excess <= tol;
  rep.demand_ok = rep.worst_demand_shortfall <= tol;
  rep.rates_ok = rep.worst_rate_mismatch <= tol;
  rep.nonneg_ok = rep.min_load >= -tol && worst_power_neg <= tol;
  return rep;
}

std::string ConstraintReport::describe() const {
  std::ostringstream os;
  os << "load excess " << worst_load_excess << (load_ok ? " ok" : " VIOLATED")
     << "; power excess " << worst_power_excess << (power_ok ? " ok" : " VIOLATED")
     << "; demand shortfall " << worst_demand_shortfall << (demand_ok ? " ok" : " VIOLATED")
     << "; rate mismatch " << worst_rate_mismatch << (rates_ok ? " ok" : " VIOLATED")
     << "; nonnegativity" << (nonneg_ok ? " ok" : " VIOLATED");
  return os.str();
}

}  // namespace tapc
