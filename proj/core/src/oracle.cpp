#include "tapc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace tapc {
namespace {

constexpr double ln2 = 0.6931471805599453;

// Average power that serves demand d exactly at load share m.
double pinned_power(double noise_over_gain, double d, double bandwidth, double m) {
  return noise_over_gain * m * std::expm1(ln2 * d / (bandwidth * m));
}

// Walk an open grid over [0,1]^dims; fn gets the point and returns void.
void sweep_box(const std::vector<double>& lo, const std::vector<double>& hi, int points,
               const std::function<void(const std::vector<double>&)>& fn) {
  const int dims = static_cast<int>(lo.size());
  std::vector<int> idx(dims, 0);
  std::vector<double> x(dims);
  while (true) {
    for (int d = 0; d < dims; ++d) {
      x[d] = lo[d] + (hi[d] - lo[d]) * (idx[d] + 0.5) / points;
    }
    fn(x);
    int d = 0;
    while (d < dims && ++idx[d] == points) idx[d++] = 0;
    if (d == dims) break;
  }
}

// Central-difference gradient norm at the incumbent times the cell diagonal:
// a first-order bound on the value gap to the continuum optimum nearby.
double local_error_bound(const std::function<double(const std::vector<double>&)>& f,
                         const std::vector<double>& x, double step) {
  if (x.empty()) return 0.0;
  double grad_sq = 0.0;
  const double h = 0.25 * step;
  for (int d = 0; d < static_cast<int>(x.size()); ++d) {
    std::vector<double> a = x, b = x;
    a[d] -= h;
    b[d] += h;
    const double fa = f(a);
    const double fb = f(b);
    if (!std::isfinite(fa) || !std::isfinite(fb)) return std::abs(f(x));
    grad_sq += ((fb - fa) / (2.0 * h)) * ((fb - fa) / (2.0 * h));
  }
  return std::sqrt(grad_sq) * step * std::sqrt(static_cast<double>(x.size()));
}

}  // namespace

GridOracleResult grid_oracle_pm_sc(const SingleCellProblem& prob, int grid_points) {
  prob.validate();
  const int m = prob.user_count();
  if (m > 4) throw std::invalid_argument("grid_oracle_pm_sc: more than 4 users");
  const auto& a = prob.noise_over_gain;
  const auto& dem = prob.demand_bps;
  const double bw = prob.bandwidth_hz;

  GridOracleResult best;
  if (m == 1) {  // the whole slot to the only user
    best.load = {1.0};
    best.avg_power = {pinned_power(a[0], dem[0], bw, 1.0)};
    best.objective = best.avg_power[0];
    return best;
  }

  const int dims = m - 1;
  auto objective = [&](const std::vector<double>& free_loads) {
    double rest = 0.0;
    double total = 0.0;
    for (int d = 0; d < dims; ++d) {
      if (free_loads[d] <= 0.0) return std::numeric_limits<double>::infinity();
      rest += free_loads[d];
      total += pinned_power(a[d], dem[d], bw, free_loads[d]);
    }
    const double last = 1.0 - rest;
    if (last <= 0.0) return std::numeric_limits<double>::infinity();
    return total + pinned_power(a[m - 1], dem[m - 1], bw, last);
  };

  best.objective = std::numeric_limits<double>::infinity();
  std::vector<double> best_x(dims, 0.0);
  auto visit = [&](const std::vector<double>& x) {
    const double v = objective(x);
    if (v < best.objective) {
      best.objective = v;
      best_x = x;
    }
  };

  std::vector<double> lo(dims, 0.0), hi(dims, 1.0);
  sweep_box(lo, hi, grid_points, visit);
  double step = 1.0 / grid_points;
  // One zoom stage around the incumbent.
  for (int d = 0; d < dims; ++d) {
    lo[d] = std::max(0.0, best_x[d] - 1.5 * step);
    hi[d] = std::min(1.0, best_x[d] + 1.5 * step);
  }
  sweep_box(lo, hi, grid_points, visit);
  step = 3.0 * step / grid_points;

  best.load.assign(m, 0.0);
  double rest = 0.0;
  for (int d = 0; d < dims; ++d) {
    best.load[d] = best_x[d];
    rest += best_x[d];
  }
  best.load[m - 1] = 1.0 - rest;
  best.avg_power.resize(m);
  for (int j = 0; j < m; ++j) best.avg_power[j] = pinned_power(a[j], dem[j], bw, best.load[j]);
  best.error_bound = local_error_bound(objective, best_x, step);
  return best;
}

GridOracleResult grid_oracle_rm_sc(const SingleCellProblem& prob, int grid_points) {
  prob.validate();
  const int m = prob.user_count();
  if (m > 3) throw std::invalid_argument("grid_oracle_rm_sc: more than 3 users");
  if (!std::isfinite(prob.power_cap))
    throw std::invalid_argument("grid_oracle_rm_sc: power cap must be finite");
  const auto& a = prob.noise_over_gain;
  const auto& dem = prob.demand_bps;
  const double bw = prob.bandwidth_hz;
  const double cap = prob.power_cap;

  GridOracleResult best;
  best.objective = -std::numeric_limits<double>::infinity();

  if (m == 1) {
    best.load = {1.0};
    best.avg_power = {cap};
    best.objective = bw * std::log2(1.0 + cap / a[0]);
    return best;
  }

  // Every user in turn plays the surplus role; the winner is whoever yields
  // the largest sum rate, with no structural assumption about link quality.
  for (int s = 0; s < m; ++s) {
    std::vector<int> pinned;
    for (int j = 0; j < m; ++j) {
      if (j != s) pinned.push_back(j);
    }
    const int dims = m - 1;

    auto sum_rate = [&](const std::vector<double>& x) {
      double load_rest = 0.0;
      double power_rest = 0.0;
      double rate = 0.0;
      for (int d = 0; d < dims; ++d) {
        const int j = pinned[d];
        if (x[d] <= 0.0) return -std::numeric_limits<double>::infinity();
        load_rest += x[d];
        power_rest += pinned_power(a[j], dem[j], bw, x[d]);
        rate += dem[j];
      }
      const double load_s = 1.0 - load_rest;
      const double power_s = cap - power_rest;
      if (load_s <= 0.0 || power_s < 0.0) return -std::numeric_limits<double>::infinity();
      const double rate_s = bw * load_s * std::log2(1.0 + power_s / (a[s] * load_s));
      if (rate_s < dem[s] * (1.0 - 1e-12)) return -std::numeric_limits<double>::infinity();
      return rate + rate_s;
    };

    double cand_best = -std::numeric_limits<double>::infinity();
    std::vector<double> cand_x(dims, 0.0);
    auto visit = [&](const std::vector<double>& x) {
      const double v = sum_rate(x);
      if (v > cand_best) {
        cand_best = v;
        cand_x = x;
      }
    };

    std::vector<double> lo(dims, 0.0), hi(dims, 1.0);
    sweep_box(lo, hi, grid_points, visit);
    if (!std::isfinite(cand_best)) continue;
    double step = 1.0 / grid_points;
    for (int d = 0; d < dims; ++d) {
      lo[d] = std::max(0.0, cand_x[d] - 1.5 * step);
      hi[d] = std::min(1.0, cand_x[d] + 1.5 * step);
    }
    sweep_box(lo, hi, grid_points, visit);
    step = 3.0 * step / grid_points;

    if (cand_best > best.objective) {
      best.objective = cand_best;
      best.load.assign(m, 0.0);
      best.avg_power.assign(m, 0.0);
      double load_rest = 0.0;
      double power_rest = 0.0;
      for (int d = 0; d < dims; ++d) {
        const int j = pinned[d];
        best.load[j] = cand_x[d];
        best.avg_power[j] = pinned_power(a[j], dem[j], bw, cand_x[d]);
        load_rest += cand_x[d];
        power_rest += best.avg_power[j];
      }
      best.load[s] = 1.0 - load_rest;
      best.avg_power[s] = cap - power_rest;
      best.error_bound = local_error_bound(sum_rate, cand_x, step);
    }
  }

  if (!std::isfinite(best.objective))
    throw std::runtime_error("grid_oracle_rm_sc: no feasible grid point");
  return best;
}

std::optional<double> analytic_2cell_fixed_point(double gain_direct, double gain_cross,
                                                 double demand_bps, double bandwidth_hz,
                                                 double noise_density) {
  const double snr_target = std::exp2(demand_bps / bandwidth_hz) - 1.0;
  const double margin = gain_direct - gain_cross * snr_target;
  if (margin <= 0.0) return std::nullopt;
  return noise_density * snr_target / margin;
}

}  // namespace tapc
