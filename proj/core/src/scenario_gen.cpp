#include "tapc/scenario_gen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace tapc {
namespace {

// The standard fixes the mt19937_64 sequence but not the std:: distributions,
// so uniform and normal draws are hand-rolled to keep scenarios byte-stable
// across toolchains.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double normal01(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Hexagonal spiral: origin first, then rings of 6r sites walked in a fixed
// order, nearest-neighbor spacing = the inter-site distance.
std::vector<Point> hex_sites(int count, double spacing) {
  std::vector<Point> sites;
  sites.push_back({0.0, 0.0});
  static constexpr int dir_q[6] = {0, -1, -1, 0, 1, 1};
  static constexpr int dir_r[6] = {-1, 0, 1, 1, 0, -1};
  for (int ring = 1; static_cast<int>(sites.size()) < count; ++ring) {
    int q = ring;  // start east of the origin, walk counterclockwise
    int r = 0;
    for (int side = 0; side < 6 && static_cast<int>(sites.size()) < count; ++side) {
      for (int step = 0; step < ring && static_cast<int>(sites.size()) < count; ++step) {
        sites.push_back({spacing * (q + 0.5 * r), spacing * (std::sqrt(3.0) / 2.0 * r)});
        q += dir_q[side];
        r += dir_r[side];
      }
    }
  }
  return sites;
}

double wrap_deg(double a) {
  while (a > 180.0) a -= 360.0;
  while (a < -180.0) a += 360.0;
  return a;
}

}  // namespace

void ScenarioGenConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("scenario config: " + what);
  };
  if (cells < 1) fail("cells must be >= 1");
  if (users_per_cell < 1) fail("users_per_cell must be >= 1");
  if (sectors_per_site < 1) fail("sectors_per_site must be >= 1");
  if (!(inter_site_m > 0.0)) fail("inter_site_m must be positive");
  if (!(carrier_ghz > 0.0)) fail("carrier_ghz must be positive");
  if (!(beamwidth_3db_deg > 0.0)) fail("beamwidth_3db_deg must be positive");
  if (!(front_to_back_db > 0.0)) fail("front_to_back_db must be positive");
  if (!(shadow_std_db >= 0.0)) fail("shadow_std_db must be nonnegative");
  if (!(min_dist_m > 0.0)) fail("min_dist_m must be positive");
  if (!(demand_bps > 0.0)) fail("demand_bps must be positive");
  if (!(power_limit_w > 0.0)) fail("power_limit_w must be positive");
  if (!(bandwidth_hz > 0.0)) fail("bandwidth_hz must be positive");
  if (max_attempts < 1) fail("max_attempts must be >= 1");
}

NetworkScenario generate_scenario(const ScenarioGenConfig& cfg) {
  cfg.validate();

  const int n = cfg.cells;
  const int total_users = cfg.cells * cfg.users_per_cell;
  const int site_count = (n + cfg.sectors_per_site - 1) / cfg.sectors_per_site;
  const std::vector<Point> sites = hex_sites(site_count, cfg.inter_site_m);

  double max_site_dist = 0.0;
  for (const Point& s : sites) max_site_dist = std::max(max_site_dist, std::hypot(s.x, s.y));
  const double coverage_radius = max_site_dist + 0.5 * cfg.inter_site_m;

  std::vector<Point> cell_site(n);
  std::vector<double> boresight_deg(n);
  for (int c = 0; c < n; ++c) {
    cell_site[c] = sites[c / cfg.sectors_per_site];
    boresight_deg[c] = (c % cfg.sectors_per_site) * 360.0 / cfg.sectors_per_site;
  }

  NetworkScenario sc;
  sc.bandwidth_hz = cfg.bandwidth_hz;
  sc.noise_density = std::pow(10.0, (cfg.noise_dbm_hz - 30.0) / 10.0);
  sc.demand_bps.assign(total_users, cfg.demand_bps);
  sc.power_limit_w.assign(n, cfg.power_limit_w);

  std::mt19937_64 rng(cfg.seed);
  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    std::vector<Point> users(total_users);
    for (Point& p : users) {
      const double radius = coverage_radius * std::sqrt(uniform01(rng));
      const double angle = 2.0 * std::numbers::pi * uniform01(rng);
      p = {radius * std::cos(angle), radius * std::sin(angle)};
    }

    sc.gain.assign(n, std::vector<double>(total_users));
    for (int c = 0; c < n; ++c) {
      for (int j = 0; j < total_users; ++j) {
        const double dx = users[j].x - cell_site[c].x;
        const double dy = users[j].y - cell_site[c].y;
        const double dist = std::max(std::hypot(dx, dy), cfg.min_dist_m);
        const double path_loss_db = cfg.pl_dist_coeff * std::log10(dist) + cfg.pl_offset_db +
                                    cfg.pl_freq_coeff * std::log10(cfg.carrier_ghz);
        const double bearing = std::atan2(dy, dx) * 180.0 / std::numbers::pi;
        const double off = wrap_deg(bearing - boresight_deg[c]);
        const double rel = off / cfg.beamwidth_3db_deg;
        const double antenna_db =
            cfg.boresight_gain_dbi - std::min(12.0 * rel * rel, cfg.front_to_back_db);
        const double shadow_db = cfg.shadow_std_db * normal01(rng);
        sc.gain[c][j] = std::pow(10.0, (antenna_db - path_loss_db + shadow_db) / 10.0);
      }
    }

    sc.cell_of.assign(total_users, 0);
    sc.cell_users.assign(n, {});
    for (int j = 0; j < total_users; ++j) {
      int best = 0;
      for (int c = 1; c < n; ++c) {
        if (sc.gain[c][j] > sc.gain[best][j]) {
          best = c;
        } else if (cfg.random_tie_break && sc.gain[c][j] == sc.gain[best][j] &&
                   uniform01(rng) < 0.5) {
          best = c;  // seeded coin flip; default keeps the lowest index
        }
      }
      sc.cell_of[j] = best;
      sc.cell_users[best].push_back(j);
    }

    bool all_served = true;
    for (int c = 0; c < n; ++c) all_served = all_served && !sc.cell_users[c].empty();
    if (all_served) {
      sc.validate();
      return sc;
    }
  }
  throw std::runtime_error("generate_scenario: a cell has no associated users after " +
                           std::to_string(cfg.max_attempts) + " attempts; " +
                           "adjust cells, users_per_cell, or the seed");
}

}  // namespace tapc
