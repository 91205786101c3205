#pragma once

#include <cstdint>

#include "tapc/model.hpp"

namespace tapc {

// Synthetic urban-micro deployment: sites on a hexagonal spiral, three-ish
// sectors per site, users dropped uniformly over the coverage disc, log-
// distance path loss with lognormal shadowing, parabolic sector antenna
// pattern, strongest-gain association. Fully deterministic under `seed`.
struct ScenarioGenConfig {
  int cells = 15;
  int users_per_cell = 30;  // average; realized per-cell counts follow association
  int sectors_per_site = 3;
  double inter_site_m = 200.0;
  double carrier_ghz = 2.5;
  double boresight_gain_dbi = 14.0;
  double beamwidth_3db_deg = 70.0;
  double front_to_back_db = 20.0;
  double pl_dist_coeff = 36.7;  // dB per decade of distance (meters)
  double pl_offset_db = 22.7;
  double pl_freq_coeff = 26.0;  // dB per decade of carrier frequency (GHz)
  double shadow_std_db = 4.0;
  double min_dist_m = 10.0;     // path-loss model validity clamp
  double demand_bps = 1e6;
  double power_limit_w = 10.0;
  double noise_dbm_hz = -174.0;
  double bandwidth_hz = 18e6;
  std::uint64_t seed = 1;
  bool random_tie_break = false;  // association ties: false = lowest cell index
  int max_attempts = 100;         // redraws allowed when a cell ends up empty

  void validate() const;  // throws std::invalid_argument
};

// Throws std::runtime_error if some cell still has no users after
// max_attempts redraws of the user positions.
NetworkScenario generate_scenario(const ScenarioGenConfig& cfg);

}  // namespace tapc
