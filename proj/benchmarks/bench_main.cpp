#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "tapc/kernels.hpp"
#include "tapc/multi_cell_pm.hpp"
#include "tapc/multi_cell_rm.hpp"
#include "tapc/scenario_gen.hpp"
#include "tapc/single_cell.hpp"

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// A loaded 30-user cell with channel qualities spread over four decades.
tapc::SingleCellProblem loaded_cell() {
  std::mt19937_64 rng(7);
  tapc::SingleCellProblem prob;
  prob.bandwidth_hz = 1e7;
  for (int j = 0; j < 30; ++j) {
    prob.noise_over_gain.push_back(4e-13 * std::exp(uniform01(rng) * std::log(1e4)));
    prob.demand_bps.push_back(1e5 + uniform01(rng) * 3e5);
  }
  return prob;
}

tapc::NetworkScenario urban_drop() {
  tapc::ScenarioGenConfig cfg;
  cfg.cells = 9;
  cfg.users_per_cell = 10;
  cfg.demand_bps = 3e5;
  cfg.seed = 3;
  return tapc::generate_scenario(cfg);
}

void bm_kernel_u_inv(benchmark::State& state) {
  double y = 1e-6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tapc::u_inv(y));
    y = y < 1e280 ? y * 1.7 : 1e-6;
  }
}
BENCHMARK(bm_kernel_u_inv);

void bm_kernel_w_inv(benchmark::State& state) {
  double y = 1e-6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tapc::w_inv(y));
    y = y < 1e280 ? y * 1.7 : 1e-6;
  }
}
BENCHMARK(bm_kernel_w_inv);

void bm_pm_sc_30_users(benchmark::State& state) {
  const auto prob = loaded_cell();
  for (auto _ : state) {
    benchmark::DoNotOptimize(tapc::pm_sc(prob));
  }
}
BENCHMARK(bm_pm_sc_30_users);

void bm_rm_sc_30_users(benchmark::State& state) {
  auto prob = loaded_cell();
  prob.power_cap = 2.0 * tapc::min_power_of_demands(prob);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tapc::rm_sc(prob));
  }
}
BENCHMARK(bm_rm_sc_30_users);

void bm_dtapc_pm_9_cells(benchmark::State& state) {
  const auto sc = urban_drop();
  for (auto _ : state) {
    benchmark::DoNotOptimize(tapc::dtapc_pm(sc));
  }
}
BENCHMARK(bm_dtapc_pm_9_cells);

void bm_dtapc_rm_9_cells(benchmark::State& state) {
  const auto sc = urban_drop();
  tapc::RmOptions opt;
  opt.multistart = 2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tapc::dtapc_rm(sc, opt));
  }
}
BENCHMARK(bm_dtapc_rm_9_cells);

}  // namespace

BENCHMARK_MAIN();
