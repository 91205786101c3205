#include "tapc/single_cell.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tapc/kernels.hpp"

namespace tapc {
namespace {

constexpr double ln2 = 0.6931471805599453;
// Caps that match the minimum feasible power this closely are treated as
// exactly binding: the power minimizer is then the rate maximizer too.
constexpr double boundary_band = 1e-9;

double nat_demand(const SingleCellProblem& p, int j) {
  return ln2 * p.demand_bps[j] / p.bandwidth_hz;  // demanded nats per hertz-second
}

// Users ordered by link quality, best (smallest noise_over_gain) first.
// Exact ties are separated by a deterministic relative nudge so the strict
// quality ordering the rate maximizer relies on exists.
struct RankedUsers {
  std::vector<int> order;          // position -> original user index
  std::vector<double> quality;     // noise_over_gain by position, strictly increasing
  bool perturbed = false;
};

RankedUsers rank_users(const SingleCellProblem& p) {
  RankedUsers r;
  r.order.resize(p.user_count());
  std::iota(r.order.begin(), r.order.end(), 0);
  std::stable_sort(r.order.begin(), r.order.end(), [&](int a, int b) {
    return p.noise_over_gain[a] < p.noise_over_gain[b];
  });
  r.quality.resize(p.user_count());
  for (int k = 0; k < p.user_count(); ++k) r.quality[k] = p.noise_over_gain[r.order[k]];
  for (int k = 1; k < p.user_count(); ++k) {
    if (r.quality[k] <= r.quality[k - 1]) {
      r.quality[k] = r.quality[k - 1] * (1.0 + 1e-12);
      r.perturbed = true;
    }
  }
  return r;
}

}  // namespace

void SingleCellProblem::validate() const {
  auto fail = [](const char* what) { throw std::invalid_argument(std::string("cell: ") + what); };
  if (user_count() <= 0) fail("no users");
  if (static_cast<int>(demand_bps.size()) != user_count()) fail("demand count mismatch");
  if (!(bandwidth_hz > 0.0)) fail("bandwidth must be positive");
  if (!(power_cap > 0.0)) fail("power cap must be positive");
  for (double a : noise_over_gain) {
    if (!(a > 0.0) || !std::isfinite(a)) fail("noise_over_gain entries must be positive");
  }
  for (double d : demand_bps) {
    if (!(d > 0.0) || !std::isfinite(d)) fail("demands must be positive");
  }
}

SingleCellProblem SingleCellProblem::from_gains(std::span<const double> gains,
                                                std::span<const double> demands,
                                                double noise_density, double bandwidth_hz,
                                                double power_cap) {
  SingleCellProblem p;
  p.noise_over_gain.reserve(gains.size());
  for (double g : gains) p.noise_over_gain.push_back(noise_density / g);
  p.demand_bps.assign(demands.begin(), demands.end());
  p.bandwidth_hz = bandwidth_hz;
  p.power_cap = power_cap;
  return p;
}

double SingleCellSolution::total_power() const {
  return std::accumulate(avg_power.begin(), avg_power.end(), 0.0);
}

double SingleCellSolution::sum_rate() const {
  return std::accumulate(rate_bps.begin(), rate_bps.end(), 0.0);
}

SingleCellSolution pm_sc(const SingleCellProblem& prob) {
  prob.validate();
  const int m = prob.user_count();
  const auto& a = prob.noise_over_gain;
  std::vector<double> b(m);
  double b_sum = 0.0;
  for (int j = 0; j < m; ++j) {
    b[j] = nat_demand(prob, j);
    b_sum += b[j];
  }

  // The optimal loads solve sum_j b_j / u_inv(price / a_j) = 1 for the time
  // price; the left side is strictly decreasing. If every load were b_j/b_sum
  // the price would be a_j * u_eval(b_sum), so those values bracket the root.
  const auto [a_min, a_max] = std::minmax_element(a.begin(), a.end());
  const double u_b = std::min(u_eval(std::min(b_sum, 705.0)), 1e300);
  auto time_budget_gap = [&](double price) {
    double s = 0.0;
    for (int j = 0; j < m; ++j) s += b[j] / u_inv(price / a[j]);
    return s - 1.0;
  };
  Bracket br;
  br.lo = std::max(0.5 * *a_min * u_b, 1e-300);
  br.hi = std::min(2.0 * *a_max * u_b, 1e300);
  br.x_tol = 0.0;  // drive the bracket to machine width
  br.f_rtol = 0.0;
  br.f_tol_abs = 1e-13;
  const std::optional<double> price = bisect_monotone(time_budget_gap, br);
  if (!price) throw std::runtime_error("pm_sc: time price bracketing failed");

  SingleCellSolution sol;
  sol.load.resize(m);
  sol.avg_power.resize(m);
  sol.rate_bps = prob.demand_bps;
  sol.time_price = *price;
  sol.mode = SingleCellSolution::Mode::power_min;
  double load_sum = 0.0;
  for (int j = 0; j < m; ++j) {
    sol.load[j] = b[j] / u_inv(*price / a[j]);
    sol.avg_power[j] = a[j] * sol.load[j] * std::expm1(b[j] / sol.load[j]);
    load_sum += sol.load[j];
  }
  sol.residual = std::abs(load_sum - 1.0);
  return sol;
}

double min_power_of_demands(const SingleCellProblem& prob) {
  return pm_sc(prob).total_power();
}

namespace {

// Rate-maximizer internals for one trial power price, in ranked-user space.
// The best user's load soaks up what the pinned users leave of the time
// budget; all quantities are smooth, strictly monotone functions of the price.
struct SurplusEval {
  double load_rest = 0.0;   // total load of the pinned users
  double power_rest = 0.0;  // total power of the pinned users
  double best_load = 0.0;
  double best_power = 0.0;

  double total_power() const { return power_rest + best_power; }
};

struct SurplusSolver {
  const SingleCellProblem& prob;
  const RankedUsers& ranked;
  std::vector<double> b;       // nat demands by rank position
  double price_limit;          // power prices at or above this leave no surplus power
  double bandwidth;

  SurplusSolver(const SingleCellProblem& p, const RankedUsers& r)
      : prob(p), ranked(r), b(p.user_count()), bandwidth(p.bandwidth_hz) {
    for (int k = 0; k < p.user_count(); ++k) b[k] = nat_demand(p, r.order[k]);
    price_limit = bandwidth / (ln2 * r.quality[0]);
  }

  // Marginal utility of time for the best user at a given power price.
  double time_price_of(double power_price) const {
    const double q0 = ranked.quality[0];
    return (bandwidth / ln2) * std::log(price_limit / power_price) - bandwidth / ln2 +
           q0 * power_price;
  }

  SurplusEval eval(double power_price) const {
    SurplusEval e;
    const double tp = time_price_of(power_price);
    for (int k = 1; k < prob.user_count(); ++k) {
      const double x = w_inv(tp / (ranked.quality[k] * power_price));
      if (!std::isfinite(x)) {  // price far below any admissible value
        e.power_rest = std::numeric_limits<double>::infinity();
        continue;
      }
      const double lx = std::log(x);
      const double load = b[k] / lx;
      e.load_rest += load;
      e.power_rest += ranked.quality[k] * load * (x - 1.0);
    }
    e.best_load = 1.0 - e.load_rest;
    e.best_power = e.best_load > 0.0
                       ? e.best_load * ranked.quality[0] * (price_limit / power_price - 1.0)
                       : 0.0;
    return e;
  }
};

SingleCellSolution assemble_surplus(const SingleCellProblem& prob, const RankedUsers& ranked,
                                    const SurplusSolver& solver, double power_price) {
  const int m = prob.user_count();
  const SurplusEval e = solver.eval(power_price);
  const double tp = solver.time_price_of(power_price);

  SingleCellSolution sol;
  sol.load.assign(m, 0.0);
  sol.avg_power.assign(m, 0.0);
  sol.rate_bps.assign(m, 0.0);
  sol.demand_price.assign(m, 0.0);
  sol.mode = SingleCellSolution::Mode::rate_surplus;
  sol.time_price = tp;
  sol.power_price = power_price;
  sol.ties_perturbed = ranked.perturbed;
  sol.surplus_user = ranked.order[0];

  for (int k = 1; k < m; ++k) {
    const int j = ranked.order[k];
    const double x = w_inv(tp / (ranked.quality[k] * power_price));
    const double lx = std::log(x);
    sol.load[j] = solver.b[k] / lx;
    sol.avg_power[j] = ranked.quality[k] * sol.load[j] * (x - 1.0);
    sol.rate_bps[j] = prob.demand_bps[j];
    sol.demand_price[j] = (ln2 * ranked.quality[k] * power_price / prob.bandwidth_hz) * x - 1.0;
  }
  const int best = ranked.order[0];
  sol.load[best] = e.best_load;
  sol.avg_power[best] = e.best_power;
  sol.rate_bps[best] =
      prob.bandwidth_hz * e.best_load * std::log2(solver.price_limit / power_price);
  sol.residual = std::abs(sol.total_power() - prob.power_cap) / prob.power_cap;
  return sol;
}

}  // namespace

RmScResult rm_sc(const SingleCellProblem& prob) {
  prob.validate();
  if (!std::isfinite(prob.power_cap))
    throw std::invalid_argument("rm_sc: power cap must be finite");
  const int m = prob.user_count();

  const SingleCellSolution min_power = pm_sc(prob);
  const double need = min_power.total_power();
  RmScResult res;
  if (need > prob.power_cap * (1.0 + boundary_band)) {
    res.power_deficit = need - prob.power_cap;
    return res;  // demands alone overrun the budget
  }
  if (need >= prob.power_cap * (1.0 - boundary_band)) {
    SingleCellSolution sol = min_power;  // the budget is exactly exhausted by the demands
    sol.mode = SingleCellSolution::Mode::rate_boundary;
    res.solution = std::move(sol);
    return res;
  }

  const RankedUsers ranked = rank_users(prob);

  if (m == 1) {
    // Whole budget and whole slot to the only user; prices in closed form.
    const double q0 = ranked.quality[0];
    SingleCellSolution sol;
    sol.load = {1.0};
    sol.avg_power = {prob.power_cap};
    sol.rate_bps = {prob.bandwidth_hz * std::log2(1.0 + prob.power_cap / q0)};
    sol.power_price = prob.bandwidth_hz / (ln2 * (prob.power_cap + q0));
    SurplusSolver solver(prob, ranked);
    sol.time_price = solver.time_price_of(sol.power_price);
    sol.demand_price = {0.0};
    sol.mode = SingleCellSolution::Mode::rate_surplus;
    sol.surplus_user = 0;
    sol.residual = 0.0;
    res.solution = std::move(sol);
    return res;
  }

  SurplusSolver solver(prob, ranked);

  // Stage 1: the largest admissible power price leaves the best user exactly
  // no time. Pinned loads grow with the price, so the margin is decreasing.
  auto best_load_of = [&](double price) { return solver.eval(price).best_load; };
  Bracket load_br;
  load_br.lo = solver.price_limit * 1e-12;
  load_br.hi = solver.price_limit * (1.0 - 1e-12);
  load_br.x_tol = 0.0;
  load_br.f_rtol = 0.0;
  load_br.f_tol_abs = 1e-12;
  load_br.max_expansions = 0;  // the mathematical domain is fixed
  const std::optional<double> price_ub = bisect_monotone(best_load_of, load_br);
  if (!price_ub) throw std::runtime_error("rm_sc: load boundary bracketing failed");

  // Stage 2: spend the whole budget. Total power falls as the price rises,
  // diverges as it vanishes, and is below the cap at the stage-1 boundary.
  // Only the lower end may move, so the bracket is grown by hand.
  auto power_gap = [&](double price) { return solver.eval(price).total_power() - prob.power_cap; };
  Bracket pw_br;
  pw_br.lo = *price_ub * 0.5;
  pw_br.hi = *price_ub;
  for (int k = 0; power_gap(pw_br.lo) < 0.0; ++k) {
    if (k > 1200) throw std::runtime_error("rm_sc: power price bracketing failed");
    pw_br.lo *= 0.5;
  }
  pw_br.x_tol = 0.0;
  pw_br.f_rtol = 0.0;
  pw_br.f_tol_abs = 1e-12 * prob.power_cap;
  pw_br.max_expansions = 0;
  const std::optional<double> price = bisect_monotone(power_gap, pw_br);
  if (!price) throw std::runtime_error("rm_sc: power price straddle failed");

  res.solution = assemble_surplus(prob, ranked, solver, *price);
  return res;
}

double rm_kkt_residual(const SingleCellProblem& prob, const SingleCellSolution& sol) {
  if (sol.mode != SingleCellSolution::Mode::rate_surplus) return 0.0;
  const double bw = prob.bandwidth_hz;
  double worst = 0.0;
  for (int j = 0; j < prob.user_count(); ++j) {
    if (!(sol.load[j] > 0.0)) continue;
    const double snr = sol.avg_power[j] / (prob.noise_over_gain[j] * sol.load[j]);
    const double weight = 1.0 + sol.demand_price[j];
    // Stationarity in the time share: the weighted marginal rate of extra
    // time must equal the time price.
    const double dt = (bw * weight / ln2) * (std::log1p(snr) - snr / (1.0 + snr));
    worst = std::max(worst, std::abs(dt - sol.time_price) / std::max(sol.time_price, 1e-300));
    // Stationarity in power: the weighted marginal rate of extra power must
    // equal the power price.
    const double dp = bw * weight * sol.load[j] /
                      (ln2 * (prob.noise_over_gain[j] * sol.load[j] + sol.avg_power[j]));
    worst = std::max(worst, std::abs(dp - sol.power_price) / sol.power_price);
  }
  return worst;
}

}  // namespace tapc
