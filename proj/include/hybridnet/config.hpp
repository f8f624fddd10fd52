#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hybridnet/util.hpp"

namespace hybridnet {

// Optional per-trial user placement: users drawn uniformly in a horizontal
// disk. When absent, user_pos must be fully specified.
struct UserDisk {
  Vec3 center;
  double radius = 0.0;
};

// Full scenario description. All values are SI internally (watts, Hz, bit/s,
// meters, radians); dBm/dB conversions happen once at ingestion.
struct NetworkConfig {
  int num_airfl = 4;    // aggregation users, decoded last
  int num_noma = 2;     // communication users, decoded in channel-gain order
  int num_elements = 20;
  int phase_bits = 2;

  double bandwidth_hz = 1e6;
  double noise_power_w = dbm_to_watt(-80.0);
  std::vector<double> power_budget_w;  // per user, size num_users(); filled by validate() if scalar default given
  double default_power_w = dbm_to_watt(23.0);
  double min_rate_bps = 2e6;
  double mse_tolerance = 0.01;
  double weight_lambda = 0.5;

  double path_loss_ref = 1e-3;  // linear gain at 1 m
  double path_loss_exp = 2.0;
  double rician_factor = 2.0;

  Vec3 bs_pos{5, 0, 15};
  Vec3 ris_pos{0, 40, 15};
  std::vector<Vec3> user_pos;          // explicit placement
  std::optional<UserDisk> user_disk;   // or sampled placement

  int trials = 200;
  std::uint64_t rng_seed = 1;

  int num_users() const { return num_airfl + num_noma; }
  int phase_levels() const { return 1 << phase_bits; }
  double phase_step() const { return kTwoPi / phase_levels(); }
  bool qos_active() const { return min_rate_bps > 0.0 && num_noma > 0; }
  bool mse_active() const { return std::isfinite(mse_tolerance) && num_airfl > 0; }

  // QoS threshold 2^(Rmin/B) - 1 shared by all communication users.
  double qos_sinr_threshold() const {
    return std::exp2(min_rate_bps / bandwidth_hz) - 1.0;
  }

  double power_budget(int user) const {
    return power_budget_w.empty() ? default_power_w : power_budget_w.at(user);
  }

  // Throws std::invalid_argument on violated invariants; normalizes the
  // power budget vector to num_users() entries.
  void validate();
};

NetworkConfig scenario_from_json_text(const std::string& json_text);
NetworkConfig load_scenario_file(const std::string& path);
std::string scenario_to_json_text(const NetworkConfig& cfg);

// Fills user positions (from the disk spec if present) into a concrete copy.
NetworkConfig place_users(const NetworkConfig& cfg, Rng& rng);

}  // namespace hybridnet
