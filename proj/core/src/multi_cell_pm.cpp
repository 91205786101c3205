#include "tapc/multi_cell_pm.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace tapc {
namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Relative l-inf distance between two power profiles.
double profile_gap(const CellPowerVector& a, const CellPowerVector& b) {
  double gap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a[i]), std::abs(b[i]), 1e-300});
    gap = std::max(gap, std::abs(a[i] - b[i]) / scale);
  }
  return gap;
}

// Minimum total density for each cell at interference profile q.
CellPowerVector min_power_map(const NetworkScenario& sc, const CellPowerVector& q) {
  const int n = sc.cell_count();
  CellPowerVector v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = min_power_of_demands(cell_subproblem(sc, i, q));
  }
  return v;
}

}  // namespace

SingleCellProblem cell_subproblem(const NetworkScenario& sc, int cell,
                                  const CellPowerVector& q) {
  SingleCellProblem prob;
  const auto& users = sc.cell_users[cell];
  prob.noise_over_gain.reserve(users.size());
  prob.demand_bps.reserve(users.size());
  for (int user : users) {
    prob.noise_over_gain.push_back(interference_density(sc, q, user) /
                                   sc.gain[cell][user]);
    prob.demand_bps.push_back(sc.demand_bps[user]);
  }
  prob.bandwidth_hz = sc.bandwidth_hz;
  prob.power_cap = sc.power_cap_density(cell);
  return prob;
}

PmResult fixed_point_iterate(
    const NetworkScenario& sc,
    const std::function<double(int, const CellPowerVector&)>& cell_update,
    const PmOptions& options) {
  const int n = sc.cell_count();
  PmResult result;

  CellPowerVector q(n, 0.0);
  if (options.initial_q) {
    if (static_cast<int>(options.initial_q->size()) != n)
      throw std::invalid_argument("fixed_point_iterate: initial profile size mismatch");
    q = *options.initial_q;
  } else {
    for (int i = 0; i < n; ++i) q[i] = sc.power_cap_density(i);
  }

  CellPowerVector next(n, 0.0);
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    double residual = 0.0;
    if (options.schedule == PmSchedule::jacobi) {
      for (int i = 0; i < n; ++i) next[i] = cell_update(i, q);
      for (int i = 0; i < n; ++i) {
        residual = std::max(residual,
                            std::abs(next[i] - q[i]) / std::max(next[i], 1e-300));
      }
      q.swap(next);
    } else {
      for (int i = 0; i < n; ++i) {
        const double updated = cell_update(i, q);
        residual = std::max(residual,
                            std::abs(updated - q[i]) / std::max(updated, 1e-300));
        q[i] = updated;
      }
    }

    result.iterations = iter;
    result.residual = residual;
    if (options.record_trace) result.trace.push_back({iter, residual, q});

    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(q[i]) ||
          q[i] > options.divergence_factor * sc.power_cap_density(i)) {
        result.status = PmStatus::diverged;
        result.cell_power = q;
        return result;
      }
    }
    if (residual <= options.tol) {
      result.status = PmStatus::converged;
      break;
    }
  }
  result.cell_power = q;
  if (result.status != PmStatus::converged) {
    result.status = PmStatus::no_convergence;
    return result;
  }

  for (int i = 0; i < n; ++i) {
    if (q[i] > sc.power_cap_density(i) * (1.0 + 1e-9)) {
      result.violating_cells.push_back(i);
    }
  }
  if (!result.violating_cells.empty()) result.status = PmStatus::infeasible_cap;
  return result;
}

PmResult dtapc_pm(const NetworkScenario& sc, const PmOptions& options) {
  sc.validate();
  auto update = [&sc](int cell, const CellPowerVector& q) {
    return min_power_of_demands(cell_subproblem(sc, cell, q));
  };
  PmResult result = fixed_point_iterate(sc, update, options);
  if (result.status != PmStatus::converged) return result;

  // Consistency pass: re-solve every cell at the converged profile and
  // scatter the per-user schedule into a network-wide allocation.
  const int n = sc.cell_count();
  const int users = sc.user_count();
  result.allocation.load.assign(users, 0.0);
  result.allocation.avg_power.assign(users, 0.0);
  result.allocation.rate_bps.assign(users, 0.0);
  result.time_price.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const SingleCellSolution sol = pm_sc(cell_subproblem(sc, i, result.cell_power));
    result.time_price[i] = sol.time_price;
    const auto& cell_users = sc.cell_users[i];
    for (std::size_t j = 0; j < cell_users.size(); ++j) {
      const int user = cell_users[j];
      result.allocation.load[user] = sol.load[j];
      result.allocation.avg_power[user] = sol.avg_power[j];
      result.allocation.rate_bps[user] = sc.demand_bps[user];
    }
  }
  return result;
}

InterferencePropertyReport interference_property_check(const NetworkScenario& sc,
                                                       std::uint64_t seed,
                                                       int samples,
                                                       double rel_slack) {
  sc.validate();
  const int n = sc.cell_count();
  std::mt19937_64 rng(seed);
  InterferencePropertyReport report;

  for (int s = 0; s < samples; ++s) {
    CellPowerVector q(n, 0.0);
    CellPowerVector higher(n, 0.0);
    double alpha = 2.0;
    if (s == 0) {
      // all-zero profile; higher stays equal to q
    } else if (s == 1) {
      for (int i = 0; i < n; ++i) higher[i] = q[i] = 0.5 * sc.power_cap_density(i);
    } else {
      for (int i = 0; i < n; ++i) {
        q[i] = uniform01(rng) * sc.power_cap_density(i);
        higher[i] = q[i] + uniform01(rng) * sc.power_cap_density(i);
      }
      alpha = 1.1 + 1.9 * uniform01(rng);
    }

    const CellPowerVector v_q = min_power_map(sc, q);
    const CellPowerVector v_higher = min_power_map(sc, higher);
    CellPowerVector scaled = q;
    for (double& x : scaled) x *= alpha;
    const CellPowerVector v_scaled = min_power_map(sc, scaled);

    for (int i = 0; i < n; ++i) {
      if (!(v_q[i] > 0.0)) ++report.positivity_violations;
      report.worst_margin = std::min(report.worst_margin, v_q[i]);

      const double mono = (v_higher[i] - v_q[i]) / std::max(v_q[i], 1e-300);
      if (mono < -rel_slack) ++report.monotonicity_violations;
      report.worst_margin = std::min(report.worst_margin, mono);

      const double scal =
          (alpha * v_q[i] - v_scaled[i]) / std::max(alpha * v_q[i], 1e-300);
      if (scal < -rel_slack) ++report.scalability_violations;
      report.worst_margin = std::min(report.worst_margin, scal);
    }
    ++report.samples;
  }
  return report;
}

double uniqueness_check(const NetworkScenario& sc, int inits, std::uint64_t seed,
                        const PmOptions& options) {
  sc.validate();
  if (inits < 2) throw std::invalid_argument("uniqueness_check: need at least 2 inits");
  const int n = sc.cell_count();
  std::mt19937_64 rng(seed);

  std::vector<CellPowerVector> fixed_points;
  for (int k = 0; k < inits; ++k) {
    CellPowerVector start(n, 0.0);
    if (k == 0) {
      // all-zero start
    } else if (k == 1) {
      for (int i = 0; i < n; ++i) start[i] = sc.power_cap_density(i);
    } else {
      for (int i = 0; i < n; ++i) start[i] = uniform01(rng) * sc.power_cap_density(i);
    }
    PmOptions opts = options;
    opts.initial_q = start;
    const PmResult res = dtapc_pm(sc, opts);
    if (res.status != PmStatus::converged)
      throw std::runtime_error("uniqueness_check: iteration failed from one start");
    fixed_points.push_back(res.cell_power);
  }

  double worst = 0.0;
  for (std::size_t a = 0; a < fixed_points.size(); ++a) {
    for (std::size_t b = a + 1; b < fixed_points.size(); ++b) {
      worst = std::max(worst, profile_gap(fixed_points[a], fixed_points[b]));
    }
  }
  return worst;
}

double feasible_demand_scale(const NetworkScenario& sc, double rel_tol,
                             const PmOptions& options) {
  sc.validate();
  auto feasible_at = [&](double scale) {
    NetworkScenario scaled = sc;
    for (double& d : scaled.demand_bps) d *= scale;
    return dtapc_pm(scaled, options).feasible();
  };

  double lo = 0.0;
  double hi = 1.0;
  if (feasible_at(hi)) {
    lo = hi;
    for (int k = 0; k < 60 && feasible_at(hi * 2.0); ++k) {
      hi *= 2.0;
      lo = hi;
    }
    hi *= 2.0;
  } else {
    while (hi > 1e-12 && !feasible_at(hi * 0.5)) hi *= 0.5;
    if (hi <= 1e-12) return 0.0;
    lo = hi * 0.5;
  }

  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (feasible_at(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace tapc
