#include "hybridnet/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hybridnet {

using nlohmann::json;

void NetworkConfig::validate() {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };

  if (num_airfl < 0 || num_noma < 0) fail("user counts must be nonnegative");
  if (num_users() < 1) fail("need at least one user");
  if (num_elements < 1) fail("need at least one reflecting element");
  if (phase_bits < 1) fail("phase resolution must be at least one bit");
  if (!(bandwidth_hz > 0)) fail("bandwidth must be positive");
  if (!(noise_power_w > 0)) fail("noise power must be positive");
  if (!(mse_tolerance > 0)) fail("aggregation error tolerance must be positive");
  if (!(weight_lambda >= 0.0 && weight_lambda <= 1.0)) fail("weight must lie in [0,1]");
  if (!(path_loss_ref > 0)) fail("reference path gain must be positive");
  if (!(path_loss_exp >= 2.0)) fail("path loss exponent must be at least 2");
  if (!(rician_factor >= 0)) fail("Rician factor must be nonnegative");
  if (min_rate_bps < 0) fail("minimum rate must be nonnegative");
  if (trials < 1) fail("trials must be at least 1");

  if (power_budget_w.empty()) {
    if (!(default_power_w > 0)) fail("power budget must be positive");
    power_budget_w.assign(static_cast<std::size_t>(num_users()), default_power_w);
  } else if (static_cast<int>(power_budget_w.size()) == 1) {
    power_budget_w.assign(static_cast<std::size_t>(num_users()), power_budget_w[0]);
  } else if (static_cast<int>(power_budget_w.size()) != num_users()) {
    fail("power budget vector size must match user count");
  }
  for (double p : power_budget_w)
    if (!(p > 0)) fail("power budget must be positive");

  if (!user_disk && static_cast<int>(user_pos.size()) != num_users())
    fail("user positions missing (give user_pos or user_disk)");
}

namespace {

Vec3 vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("config: positions are [x,y,z]");
  return Vec3{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec3_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

}  // namespace

NetworkConfig scenario_from_json_text(const std::string& text) {
  json j = json::parse(text);
  NetworkConfig cfg;

  auto get = [&](const char* key, auto& out) {
    if (j.contains(key)) out = j.at(key).get<std::decay_t<decltype(out)>>();
  };
  get("num_airfl", cfg.num_airfl);
  get("num_noma", cfg.num_noma);
  get("num_elements", cfg.num_elements);
  get("phase_bits", cfg.phase_bits);
  get("bandwidth_hz", cfg.bandwidth_hz);
  get("min_rate_bps", cfg.min_rate_bps);
  get("mse_tolerance", cfg.mse_tolerance);
  get("weight_lambda", cfg.weight_lambda);
  get("path_loss_exp", cfg.path_loss_exp);
  get("rician_factor", cfg.rician_factor);
  get("trials", cfg.trials);
  get("rng_seed", cfg.rng_seed);

  // Unit-suffixed keys make the dBm/watt choice explicit.
  if (j.contains("noise_power_dbm")) cfg.noise_power_w = dbm_to_watt(j.at("noise_power_dbm").get<double>());
  if (j.contains("noise_power_w")) cfg.noise_power_w = j.at("noise_power_w").get<double>();
  if (j.contains("power_budget_dbm")) {
    const auto& p = j.at("power_budget_dbm");
    cfg.power_budget_w.clear();
    if (p.is_array())
      for (const auto& v : p) cfg.power_budget_w.push_back(dbm_to_watt(v.get<double>()));
    else
      cfg.default_power_w = dbm_to_watt(p.get<double>());
  }
  if (j.contains("power_budget_w")) {
    const auto& p = j.at("power_budget_w");
    cfg.power_budget_w.clear();
    if (p.is_array())
      for (const auto& v : p) cfg.power_budget_w.push_back(v.get<double>());
    else
      cfg.default_power_w = p.get<double>();
  }
  if (j.contains("path_loss_ref_db")) cfg.path_loss_ref = db_to_linear(j.at("path_loss_ref_db").get<double>());
  if (j.contains("path_loss_ref")) cfg.path_loss_ref = j.at("path_loss_ref").get<double>();

  if (j.contains("bs_pos")) cfg.bs_pos = vec3_from_json(j.at("bs_pos"));
  if (j.contains("ris_pos")) cfg.ris_pos = vec3_from_json(j.at("ris_pos"));
  if (j.contains("user_pos")) {
    cfg.user_pos.clear();
    for (const auto& u : j.at("user_pos")) cfg.user_pos.push_back(vec3_from_json(u));
  }
  if (j.contains("user_disk")) {
    UserDisk disk;
    disk.center = vec3_from_json(j.at("user_disk").at("center"));
    disk.radius = j.at("user_disk").at("radius").get<double>();
    cfg.user_disk = disk;
  }

  cfg.validate();
  return cfg;
}

NetworkConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json_text(ss.str());
}

std::string scenario_to_json_text(const NetworkConfig& cfg) {
  json j;
  j["num_airfl"] = cfg.num_airfl;
  j["num_noma"] = cfg.num_noma;
  j["num_elements"] = cfg.num_elements;
  j["phase_bits"] = cfg.phase_bits;
  j["bandwidth_hz"] = cfg.bandwidth_hz;
  j["noise_power_w"] = cfg.noise_power_w;
  j["power_budget_w"] = cfg.power_budget_w;
  j["min_rate_bps"] = cfg.min_rate_bps;
  j["mse_tolerance"] = cfg.mse_tolerance;
  j["weight_lambda"] = cfg.weight_lambda;
  j["path_loss_ref"] = cfg.path_loss_ref;
  j["path_loss_exp"] = cfg.path_loss_exp;
  j["rician_factor"] = cfg.rician_factor;
  j["bs_pos"] = vec3_to_json(cfg.bs_pos);
  j["ris_pos"] = vec3_to_json(cfg.ris_pos);
  if (cfg.user_disk) {
    j["user_disk"] = {{"center", vec3_to_json(cfg.user_disk->center)}, {"radius", cfg.user_disk->radius}};
  }
  if (!cfg.user_pos.empty()) {
    json arr = json::array();
    for (const auto& u : cfg.user_pos) arr.push_back(vec3_to_json(u));
    j["user_pos"] = arr;
  }
  j["trials"] = cfg.trials;
  j["rng_seed"] = cfg.rng_seed;
  return j.dump(2);
}

NetworkConfig place_users(const NetworkConfig& cfg, Rng& rng) {
  NetworkConfig out = cfg;
  if (cfg.user_disk) {
    out.user_pos.clear();
    out.user_pos.reserve(static_cast<std::size_t>(cfg.num_users()));
    for (int i = 0; i < cfg.num_users(); ++i) {
      // Uniform over the disk: radius via sqrt transform.
      const double r = cfg.user_disk->radius * std::sqrt(rng.uniform());
      const double ang = rng.uniform(0.0, kTwoPi);
      out.user_pos.push_back(Vec3{cfg.user_disk->center.x + r * std::cos(ang),
                                  cfg.user_disk->center.y + r * std::sin(ang),
                                  cfg.user_disk->center.z});
    }
  }
  out.validate();
  return out;
}

}  // namespace hybridnet
