#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "tapc/oracle.hpp"
#include "tapc/single_cell.hpp"

using tapc::GridOracleResult;
using tapc::SingleCellProblem;

namespace {

constexpr double kBand = 1e7;

SingleCellProblem make_problem(std::vector<double> a, std::vector<double> d,
                               double cap = std::numeric_limits<double>::infinity()) {
  SingleCellProblem prob;
  prob.noise_over_gain = std::move(a);
  prob.demand_bps = std::move(d);
  prob.bandwidth_hz = kBand;
  prob.power_cap = cap;
  return prob;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("single-user grids are exact") {
  const double a = 3e-13;
  const double d = 2e6;
  const auto pm = tapc::grid_oracle_pm_sc(make_problem({a}, {d}));
  CHECK(pm.load[0] == 1.0);
  CHECK(pm.objective == doctest::Approx(a * std::expm1(std::log(2.0) * d / kBand)));

  const double cap = 5e-12;
  const auto rm = tapc::grid_oracle_rm_sc(make_problem({a}, {d}, cap));
  CHECK(rm.load[0] == 1.0);
  CHECK(rm.avg_power[0] == cap);
  CHECK(rm.objective == doctest::Approx(kBand * std::log2(1.0 + cap / a)));
}

TEST_CASE("grid minimum brackets the true power minimum") {
  const auto prob = make_problem({2e-13, 6e-13, 9e-14}, {1e6, 1.5e6, 8e5});
  const auto oracle = tapc::grid_oracle_pm_sc(prob, 150);
  const double solver = tapc::pm_sc(prob).total_power();

  // Every grid point is feasible, so the grid value can only sit above the
  // optimum; with the zoom stage it must sit close above it.
  CHECK(solver <= oracle.objective * (1.0 + 1e-12));
  CHECK(oracle.objective - solver <= std::max(2.0 * oracle.error_bound, 1e-6 * solver));

  double load_sum = 0.0;
  for (double m : oracle.load) {
    CHECK(m > 0.0);
    load_sum += m;
  }
  CHECK(load_sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("grid maximum brackets the true rate maximum") {
  auto prob = make_problem({2e-13, 6e-13}, {1e6, 1.5e6});
  prob.power_cap = 2.0 * tapc::min_power_of_demands(prob);
  const auto oracle = tapc::grid_oracle_rm_sc(prob, 150);
  const auto res = tapc::rm_sc(prob);
  REQUIRE(res.feasible());
  const double solver = res.solution->sum_rate();

  CHECK(solver >= oracle.objective * (1.0 - 1e-12));
  CHECK(solver - oracle.objective <= std::max(2.0 * oracle.error_bound, 1e-6 * solver));

  // The oracle's own point must be feasible: slot filled, budget respected,
  // demands met.
  double load_sum = 0.0;
  double power_sum = 0.0;
  for (std::size_t j = 0; j < oracle.load.size(); ++j) {
    load_sum += oracle.load[j];
    power_sum += oracle.avg_power[j];
  }
  CHECK(load_sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(power_sum <= prob.power_cap * (1.0 + 1e-12));
  for (std::size_t j = 0; j < oracle.load.size(); ++j) {
    const double rate = kBand * oracle.load[j] *
                        std::log2(1.0 + oracle.avg_power[j] /
                                            (prob.noise_over_gain[j] * oracle.load[j]));
    CHECK(rate >= prob.demand_bps[j] * (1.0 - 1e-9));
  }
}

TEST_CASE("the rate grid considers every user for the surplus role") {
  // The strongest user has a tiny demand; giving the slack to anyone else
  // would be suboptimal, and the oracle must discover that on its own.
  auto prob = make_problem({1e-13, 5e-13}, {1e5, 1e6});
  prob.power_cap = 3.0 * tapc::min_power_of_demands(prob);
  const auto oracle = tapc::grid_oracle_rm_sc(prob, 200);
  // User 0 ends with far more than its demand.
  const double rate0 = kBand * oracle.load[0] *
                       std::log2(1.0 + oracle.avg_power[0] /
                                           (prob.noise_over_gain[0] * oracle.load[0]));
  CHECK(rate0 > 5.0 * prob.demand_bps[0]);
}

TEST_CASE("symmetric pair fixed point matches its closed form") {
  const double g = 1e-7;
  const double g_cross = 2e-9;
  const double d = 2e6;
  const double noise = 4e-18;
  const auto q = tapc::analytic_2cell_fixed_point(g, g_cross, d, kBand, noise);
  REQUIRE(q.has_value());
  const double c = std::exp2(d / kBand) - 1.0;
  CHECK(*q == doctest::Approx(noise * c / (g - g_cross * c)).epsilon(1e-15));

  // The fixed point really is one: serving the demand against the partner's
  // density q needs exactly q again.
  const double sinr = (*q) * g / ((*q) * g_cross + noise);
  CHECK(kBand * std::log2(1.0 + sinr) == doctest::Approx(d).epsilon(1e-12));
}

TEST_CASE("closed form reports infeasibility past the coupling limit") {
  const double g = 1e-7;
  const double g_cross = 2e-9;
  // Feasibility ends where the demanded SINR reaches g/g_cross = 50.
  const double d_edge = kBand * std::log2(1.0 + g / g_cross);
  CHECK(tapc::analytic_2cell_fixed_point(g, g_cross, 0.99 * d_edge, kBand, 4e-18)
            .has_value());
  CHECK_FALSE(tapc::analytic_2cell_fixed_point(g, g_cross, 1.01 * d_edge, kBand, 4e-18)
                  .has_value());
}

TEST_CASE("grids refuse oversized problems") {
  CHECK_THROWS_AS(
      tapc::grid_oracle_pm_sc(make_problem({1e-13, 1e-13, 1e-13, 1e-13, 1e-13},
                                           {1e6, 1e6, 1e6, 1e6, 1e6})),
      std::invalid_argument);
  CHECK_THROWS_AS(tapc::grid_oracle_rm_sc(
                      make_problem({1e-13, 1e-13, 1e-13, 1e-13}, {1e6, 1e6, 1e6, 1e6}, 1e-9)),
                  std::invalid_argument);
}

}  // TEST_SUITE
