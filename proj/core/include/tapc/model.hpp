#pragma once

#include <string>
#include <vector>

namespace tapc {

// Time-averaged transmit power spectral density per cell, W/Hz. Entry i is
// the sum of avg_power over the users of cell i.
using CellPowerVector = std::vector<double>;

// A downlink network: cells (one per BS sector), users with a fixed serving
// cell, link gains from every cell to every user, per-user rate demands and
// per-cell average transmit power budgets.
//
// Unit conventions: gains are linear power ratios, noise_density is W/Hz,
// bandwidth_hz is Hz, demands are bit/s, power limits are watts. Solvers work
// in spectral densities; the per-cell density cap is power_limit_w / bandwidth.
struct NetworkScenario {
  double bandwidth_hz = 0.0;
  double noise_density = 0.0;                // W/Hz
  std::vector<std::vector<int>> cell_users;  // global user ids per cell, each non-empty
  std::vector<int> cell_of;                  // serving cell per user
  std::vector<std::vector<double>> gain;     // [cell][user], all positive
  std::vector<double> demand_bps;            // per user, positive
  std::vector<double> power_limit_w;         // per cell, positive

  int cell_count() const { return static_cast<int>(cell_users.size()); }
  int user_count() const { return static_cast<int>(cell_of.size()); }
  double power_cap_density(int cell) const { return power_limit_w[cell] / bandwidth_hz; }

  // Throws std::invalid_argument on any structural or sign violation.
  void validate() const;
};

// A schedule: per-user time share and time-averaged transmit PSD. The average
// power is the canonical stored power variable; the PSD while the user is
// actually served is avg_power / load. rate_bps carries the rates the
// producing solver certifies; validate_allocation cross-checks them.
struct Allocation {
  std::vector<double> load;       // time fraction per user, in [0, 1]
  std::vector<double> avg_power;  // W/Hz per user
  std::vector<double> rate_bps;   // bit/s per user

  double serving_power(int user) const {
    return load[user] > 0.0 ? avg_power[user] / load[user] : 0.0;
  }
};

double cell_power(const Allocation& alloc, const NetworkScenario& sc, int cell);
CellPowerVector cell_powers(const Allocation& alloc, const NetworkScenario& sc);

// Received interference-plus-noise density at a user, W/Hz: every cell other
// than the serving one contributes its average PSD times its gain to the user.
double interference_density(const NetworkScenario& sc, const CellPowerVector& q, int user);

// SINR while the user is served: serving PSD times own gain over the
// interference-plus-noise density. Zero when the user gets no time share.
double sinr(const Allocation& alloc, const NetworkScenario& sc, int user);

// Shannon rate over the shared band: bandwidth * load * log2(1 + sinr),
// exactly zero when load is zero.
double user_rate(const Allocation& alloc, const NetworkScenario& sc, int user);
std::vector<double> user_rates(const Allocation& alloc, const NetworkScenario& sc);

// Worst-case violation magnitudes over all constraint families. Excesses and
// shortfalls are clamped at zero, so a fully feasible allocation reports all
// zeros. Power and demand figures are relative, the load figure absolute.
struct ConstraintReport {
  double tolerance = 0.0;
  double worst_load_excess = 0.0;      // max over cells of sum(load) - 1
  double worst_power_excess = 0.0;     // max over cells of (sum(avg_power) - cap)/cap
  double worst_demand_shortfall = 0.0; // max over users of (demand - rate)/demand
  double worst_rate_mismatch = 0.0;    // stored vs recomputed rate, relative to demand
  double min_load = 0.0;
  double min_avg_power = 0.0;
  bool load_ok = false;
  bool power_ok = false;
  bool demand_ok = false;
  bool rates_ok = false;
  bool nonneg_ok = false;

  bool ok() const { return load_ok && power_ok && demand_ok && rates_ok && nonneg_ok; }
  std::string describe() const;
};

ConstraintReport validate_allocation(const Allocation& alloc, const NetworkScenario& sc,
                                     double tol);

}  // namespace tapc
