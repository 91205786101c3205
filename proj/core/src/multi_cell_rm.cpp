#include "tapc/multi_cell_rm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace tapc {
namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Working copy of one run: the schedule, the per-cell densities it induces,
// and bookkeeping about each cell's latest re-optimisation.
struct SweepState {
  Allocation alloc;  // rate_bps holds the recorded (promised) rates
  CellPowerVector q;
  std::vector<SingleCellSolution::Mode> mode;
  std::vector<int> surplus;            // network user id per cell, -1 if none
  std::vector<double> cell_recorded;   // per-cell recorded sum rate
};

double total_recorded(const SweepState& st) {
  return std::accumulate(st.cell_recorded.begin(), st.cell_recorded.end(), 0.0);
}

void commit_cell(const NetworkScenario& sc, int cell, const SingleCellSolution& sol,
                 SweepState& st) {
  const auto& users = sc.cell_users[cell];
  double total = 0.0;
  double recorded = 0.0;
  for (std::size_t j = 0; j < users.size(); ++j) {
    const int user = users[j];
    st.alloc.load[user] = sol.load[j];
    st.alloc.avg_power[user] = sol.avg_power[j];
    st.alloc.rate_bps[user] = sol.rate_bps[j];
    total += sol.avg_power[j];
    recorded += sol.rate_bps[j];
  }
  st.q[cell] = total;
  st.cell_recorded[cell] = recorded;
  st.mode[cell] = sol.mode;
  st.surplus[cell] = sol.surplus_user >= 0 ? users[sol.surplus_user] : -1;
}

// Solve every cell against the profile q_hat, with its own entry as the power
// budget. Empty when some cell cannot serve its demands within that budget.
std::optional<SweepState> init_state(const NetworkScenario& sc,
                                     const CellPowerVector& q_hat) {
  const int n = sc.cell_count();
  SweepState st;
  st.alloc.load.assign(sc.user_count(), 0.0);
  st.alloc.avg_power.assign(sc.user_count(), 0.0);
  st.alloc.rate_bps.assign(sc.user_count(), 0.0);
  st.q.assign(n, 0.0);
  st.mode.assign(n, SingleCellSolution::Mode::power_min);
  st.surplus.assign(n, -1);
  st.cell_recorded.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    SingleCellProblem prob = cell_subproblem(sc, i, q_hat);
    prob.power_cap = std::min(prob.power_cap, q_hat[i]);
    const RmScResult res = rm_sc(prob);
    if (!res.feasible()) return std::nullopt;
    commit_cell(sc, i, *res.solution, st);
  }
  return st;
}

// One cell's turn: re-optimise its own schedule subject to every other cell's
// recorded rates surviving the change; keep the current schedule when nothing
// at least as good is available.
void update_cell(const NetworkScenario& sc, int cell, SweepState& st) {
  const double cap = std::min(sc.power_cap_density(cell),
                              coupled_power_cap(sc, st.alloc, st.q, cell));
  if (!(cap > 0.0)) return;
  SingleCellProblem prob = cell_subproblem(sc, cell, st.q);
  prob.power_cap = cap;
  const RmScResult res = rm_sc(prob);
  if (!res.feasible()) return;
  if (res.solution->sum_rate() < st.cell_recorded[cell]) return;
  commit_cell(sc, cell, *res.solution, st);
}

}  // namespace

double effective_gain(const NetworkScenario& sc, const CellPowerVector& q, int user) {
  return sc.gain[sc.cell_of[user]][user] / interference_density(sc, q, user);
}

double coupled_power_cap(const NetworkScenario& sc, const Allocation& recorded,
                         const CellPowerVector& q, int cell) {
  const int n = sc.cell_count();
  double cap = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    if (k == cell) continue;
    for (int user : sc.cell_users[k]) {
      const double m = recorded.load[user];
      const double pw = recorded.avg_power[user];
      const double rate = recorded.rate_bps[user];
      if (!(m > 0.0) || !(pw > 0.0) || !(rate > 0.0)) continue;
      const double growth = std::exp2(rate / (sc.bandwidth_hz * m)) - 1.0;
      if (!(growth > 0.0)) continue;
      double other = sc.noise_density;  // interference the cell cannot control
      for (int s = 0; s < n; ++s) {
        if (s == cell || s == k) continue;
        other += q[s] * sc.gain[s][user];
      }
      const double affordable =
          (pw * sc.gain[k][user] / (m * growth) - other) / sc.gain[cell][user];
      cap = std::min(cap, affordable);
    }
  }
  return cap;
}

RmResult dtapc_rm(const NetworkScenario& sc, const RmOptions& options) {
  sc.validate();
  RmResult out;

  const PmResult pm = dtapc_pm(sc, options.pm);
  out.pm_status = pm.status;
  if (!pm.feasible()) {
    out.status = RmStatus::infeasible;
    return out;
  }

  const int n = sc.cell_count();
  std::mt19937_64 rng(options.seed);

  // Starting budgets: the minimum-power profile lifted multiplicatively and
  // clamped at the caps. When no cell is clamped, the lifted profile can
  // serve all demands with room to spare (the minimum-power map grows slower
  // than linearly), so halving the lift always reaches a workable start.
  // The first start is the most aggressive lift; the rest are seeded.
  std::vector<double> lift_log2;
  if (!options.initial_q) {
    const int count = std::max(1, options.multistart);
    for (int k = 0; k < count; ++k)
      lift_log2.push_back(k == 0 ? 60.0 : 60.0 * uniform01(rng));
  }

  auto lifted_profile = [&](double log2_kappa) {
    const double kappa = std::exp2(log2_kappa);
    CellPowerVector q_hat(n);
    for (int i = 0; i < n; ++i)
      q_hat[i] = std::min(sc.power_cap_density(i), kappa * pm.cell_power[i]);
    return q_hat;
  };

  const std::size_t start_count = options.initial_q ? 1 : lift_log2.size();
  bool have_best = false;
  for (std::size_t k = 0; k < start_count; ++k) {
    std::optional<SweepState> state;
    if (options.initial_q) {
      if (static_cast<int>(options.initial_q->size()) != n)
        throw std::invalid_argument("dtapc_rm: initial profile size mismatch");
      state = init_state(sc, *options.initial_q);
    } else {
      double log2_kappa = lift_log2[k];
      state = init_state(sc, lifted_profile(log2_kappa));
      while (!state && log2_kappa > 0.0) {
        log2_kappa = std::max(0.0, log2_kappa - 1.0);
        state = init_state(sc, lifted_profile(log2_kappa));
      }
    }
    if (!state) {
      // Degenerate budgets: fall back to the minimum-power schedule itself.
      state = SweepState{};
      state->alloc = pm.allocation;
      state->q = cell_powers(pm.allocation, sc);
      state->mode.assign(n, SingleCellSolution::Mode::power_min);
      state->surplus.assign(n, -1);
      state->cell_recorded.assign(n, 0.0);
      for (int i = 0; i < n; ++i) {
        for (int user : sc.cell_users[i])
          state->cell_recorded[i] += pm.allocation.rate_bps[user];
      }
    }

    RmResult run;
    run.pm_status = pm.status;
    run.start_used = static_cast<int>(k);
    run.trace.push_back(total_recorded(*state));
    double prev = run.trace.back();
    run.status = RmStatus::no_convergence;
    for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
      for (int i = 0; i < n; ++i) update_cell(sc, i, *state);
      const double now = total_recorded(*state);
      run.trace.push_back(now);
      run.sweeps = sweep;
      if (std::abs(now - prev) <= options.tol * std::max(std::abs(now), 1e-300)) {
        run.status = RmStatus::converged;
        break;
      }
      prev = now;
    }

    run.allocation = state->alloc;
    run.allocation.rate_bps = user_rates(state->alloc, sc);
    run.cell_power = state->q;
    run.recorded_sum_rate_bps = total_recorded(*state);
    run.sum_rate_bps = std::accumulate(run.allocation.rate_bps.begin(),
                                       run.allocation.rate_bps.end(), 0.0);
    run.cell_mode = state->mode;
    run.surplus_user = state->surplus;
    run.full_load = true;
    for (int i = 0; i < n && run.full_load; ++i) {
      double load = 0.0;
      for (int user : sc.cell_users[i]) load += state->alloc.load[user];
      if (load < 1.0 - 1e-6) run.full_load = false;
    }

    if (!have_best || run.sum_rate_bps > out.sum_rate_bps) {
      out = run;
      have_best = true;
    }
  }
  return out;
}

}  // namespace tapc
