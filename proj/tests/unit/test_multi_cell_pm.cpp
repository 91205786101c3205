#include <cmath>
#include <vector>

#include "doctest.h"
#include "tapc/multi_cell_pm.hpp"
#include "tapc/oracle.hpp"
#include "tapc/scenario_gen.hpp"
#include "tapc/single_cell.hpp"

using tapc::CellPowerVector;
using tapc::NetworkScenario;
using tapc::PmOptions;
using tapc::PmSchedule;
using tapc::PmStatus;

namespace {

constexpr double kBand = 1e7;
constexpr double kNoise = 4e-18;
constexpr double kGainDirect = 1e-7;
constexpr double kGainCross = 2e-9;

NetworkScenario one_cell() {
  NetworkScenario sc;
  sc.bandwidth_hz = kBand;
  sc.noise_density = kNoise;
  sc.cell_users = {{0, 1}};
  sc.cell_of = {0, 0};
  sc.gain = {{1e-7, 3e-8}};
  sc.demand_bps = {2e6, 1e6};
  sc.power_limit_w = {1.0};
  return sc;
}

NetworkScenario symmetric_pair(double demand_bps) {
  NetworkScenario sc;
  sc.bandwidth_hz = kBand;
  sc.noise_density = kNoise;
  sc.cell_users = {{0}, {1}};
  sc.cell_of = {0, 1};
  sc.gain = {{kGainDirect, kGainCross}, {kGainCross, kGainDirect}};
  sc.demand_bps = {demand_bps, demand_bps};
  sc.power_limit_w = {1.0, 1.0};
  return sc;
}

NetworkScenario small_urban() {
  tapc::ScenarioGenConfig cfg;
  cfg.cells = 3;
  cfg.users_per_cell = 2;
  cfg.demand_bps = 4e5;
  cfg.seed = 11;
  return tapc::generate_scenario(cfg);
}

}  // namespace

TEST_SUITE("multi-cell-pm") {

TEST_CASE("an isolated cell reduces to the single-cell minimizer") {
  const auto sc = one_cell();
  const auto res = tapc::dtapc_pm(sc);
  REQUIRE(res.status == PmStatus::converged);

  const auto sol = tapc::pm_sc(tapc::cell_subproblem(sc, 0, CellPowerVector{0.0}));
  CHECK(res.cell_power[0] == doctest::Approx(sol.total_power()).epsilon(1e-10));
  for (int j = 0; j < 2; ++j) {
    CHECK(res.allocation.load[j] == doctest::Approx(sol.load[j]).epsilon(1e-10));
    CHECK(res.allocation.avg_power[j] == doctest::Approx(sol.avg_power[j]).epsilon(1e-10));
    CHECK(res.allocation.rate_bps[j] == sc.demand_bps[j]);
  }
  CHECK(res.time_price[0] == doctest::Approx(sol.time_price).epsilon(1e-8));
}

TEST_CASE("the cell subproblem folds interference into the noise term") {
  const auto sc = symmetric_pair(2e6);
  const CellPowerVector q{0.0, 5e-12};
  const auto prob = tapc::cell_subproblem(sc, 0, q);
  REQUIRE(prob.user_count() == 1);
  const double itf = 5e-12 * kGainCross + kNoise;
  CHECK(prob.noise_over_gain[0] == doctest::Approx(itf / kGainDirect).epsilon(1e-15));
  CHECK(prob.demand_bps[0] == 2e6);
  CHECK(prob.bandwidth_hz == kBand);
  CHECK(prob.power_cap == doctest::Approx(sc.power_cap_density(0)));

  // The cell's own density never interferes with its own users.
  const auto same = tapc::cell_subproblem(sc, 0, CellPowerVector{7.0, 5e-12});
  CHECK(same.noise_over_gain[0] == prob.noise_over_gain[0]);
}

TEST_CASE("a symmetric pair converges to the analytic fixed point") {
  const double demand = 2e6;
  const auto sc = symmetric_pair(demand);
  PmOptions opt;
  opt.tol = 1e-12;
  const auto res = tapc::dtapc_pm(sc, opt);
  REQUIRE(res.status == PmStatus::converged);

  const auto q_star =
      tapc::analytic_2cell_fixed_point(kGainDirect, kGainCross, demand, kBand, kNoise);
  REQUIRE(q_star.has_value());
  CHECK(res.cell_power[0] == doctest::Approx(*q_star).epsilon(1e-8));
  CHECK(res.cell_power[1] == doctest::Approx(*q_star).epsilon(1e-8));

  const auto report = tapc::validate_allocation(res.allocation, sc, 1e-6);
  CHECK(report.ok());
}

TEST_CASE("iterates started from the caps decrease monotonically") {
  const auto sc = symmetric_pair(2e6);
  PmOptions opt;
  opt.record_trace = true;
  const auto res = tapc::dtapc_pm(sc, opt);
  REQUIRE(res.status == PmStatus::converged);
  REQUIRE(res.trace.size() >= 2);

  CellPowerVector prev{sc.power_cap_density(0), sc.power_cap_density(1)};
  for (const auto& row : res.trace) {
    for (int i = 0; i < sc.cell_count(); ++i) {
      CHECK(row.q[i] <= prev[i] * (1.0 + 1e-9));
    }
    prev = row.q;
  }
}

TEST_CASE("the converged profile is a fixed point of the per-cell map") {
  for (const auto& sc : {symmetric_pair(2e6), small_urban()}) {
    const auto res = tapc::dtapc_pm(sc);
    REQUIRE(res.status == PmStatus::converged);
    for (int i = 0; i < sc.cell_count(); ++i) {
      const double mapped =
          tapc::min_power_of_demands(tapc::cell_subproblem(sc, i, res.cell_power));
      CHECK(std::abs(mapped - res.cell_power[i]) <= 2e-8 * res.cell_power[i]);
    }
  }
}

TEST_CASE("the per-cell minimum-power map is a standard interference function") {
  const auto report = tapc::interference_property_check(small_urban(), 77, 200);
  CHECK(report.samples == 200);
  CHECK(report.ok());
  CHECK(report.worst_margin >= -1e-10);
}

TEST_CASE("all starting profiles land on the same fixed point") {
  CHECK(tapc::uniqueness_check(small_urban(), 5, 123) <= 1e-7);
}

TEST_CASE("jacobi and sweep-ordered schedules agree") {
  const auto sc = small_urban();
  PmOptions jac;
  const auto a = tapc::dtapc_pm(sc, jac);
  PmOptions gs;
  gs.schedule = PmSchedule::gauss_seidel;
  const auto b = tapc::dtapc_pm(sc, gs);
  REQUIRE(a.status == PmStatus::converged);
  REQUIRE(b.status == PmStatus::converged);
  for (int i = 0; i < sc.cell_count(); ++i) {
    CHECK(a.cell_power[i] == doctest::Approx(b.cell_power[i]).epsilon(1e-7));
  }
}

TEST_CASE("demands beyond the coupling limit are reported, not served") {
  // SINR demand past gain_direct / gain_cross = 50 (demand / bandwidth above
  // log2(51) ~ 5.7): no finite fixed point exists and the iterates blow up.
  const auto sc = symmetric_pair(7.0 * kBand);
  const auto res = tapc::dtapc_pm(sc);
  CHECK_FALSE(res.feasible());
  CHECK(res.status != PmStatus::converged);
  CHECK(res.iterations > 0);
}

TEST_CASE("an interior fixed point above the cap flags the violating cells") {
  auto sc = symmetric_pair(2e6);
  // The fixed point needs ~6e-12 W/Hz; a 1e-6 W budget caps the density at
  // 1e-13 W/Hz, far below it, while iterates stay bounded.
  sc.power_limit_w = {1e-6, 1e-6};
  const auto res = tapc::dtapc_pm(sc);
  CHECK(res.status == PmStatus::infeasible_cap);
  REQUIRE(res.violating_cells.size() == 2);
  CHECK(res.violating_cells[0] == 0);
  CHECK(res.violating_cells[1] == 1);
}

TEST_CASE("the feasibility edge of a symmetric pair matches its closed form") {
  const double demand = 2e6;
  const auto sc = symmetric_pair(demand);

  // The cap binds first: the density at the fixed point hits the cap when the
  // SINR target reaches cap*g / (noise + cap*g_cross).
  const double cap = sc.power_cap_density(0);
  const double c_star = cap * kGainDirect / (kNoise + cap * kGainCross);
  const double s_star = kBand * std::log2(1.0 + c_star) / demand;

  const double scale = tapc::feasible_demand_scale(sc, 1e-3);
  CHECK(scale == doctest::Approx(s_star).epsilon(3e-3));

  auto probe = sc;
  probe.demand_bps = {0.99 * scale * demand, 0.99 * scale * demand};
  CHECK(tapc::dtapc_pm(probe).feasible());
  probe.demand_bps = {1.02 * scale * demand, 1.02 * scale * demand};
  CHECK_FALSE(tapc::dtapc_pm(probe).feasible());
}

}  // TEST_SUITE
