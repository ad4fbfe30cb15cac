#include <fstream>

#include "json.hpp"
#include "uwbrss/channel_sim.hpp"
#include "uwbrss/errors.hpp"

namespace uwbrss {

namespace {

// Narrow corridor: strong, dense early wall bounces decaying quickly.
EnvironmentProfile hallway_env() {
  EnvironmentProfile env;
  env.name = "hallway";
  env.pl_exponent = 2.0;
  env.pl_ref_db = 40.0;
  env.shadowing_sigma_db = 0.025;
  env.noise_floor_amp = 0.0;
  for (int delay = 1; delay <= 18; ++delay)
    env.taps.push_back({delay, -(3.0 + 1.2 * (delay - 1)), 0.05});
  return env;
}

// Large room: echoes start later, arrive weaker and decay slowly.
EnvironmentProfile hall_env() {
  EnvironmentProfile env;
  env.name = "hall";
  env.pl_exponent = 2.0;
  env.pl_ref_db = 40.0;
  env.shadowing_sigma_db = 0.03;
  env.noise_floor_amp = 0.0;
  for (int delay = 3; delay <= 22; ++delay)
    env.taps.push_back({delay, -(6.0 + 0.55 * (delay - 3)), 0.06});
  return env;
}

// sensitivity_amp puts the max-gain link margin at ~0.9 dB for 6.5 m and
// keeps every distance's delivery threshold >= 0.095 dB away from the 0.5 dB
// gain grid, so min-gain tables are stable under the preset shadowing;
// clip_amp saturates max-gain first paths below ~2.6 m.
ReceiverProfile receiver(bool agc_on) {
  ReceiverProfile rx;
  rx.agc_on = agc_on;
  rx.agc_target_amp = 0.15;
  rx.agc_gain_min_db = -24.0;
  rx.agc_gain_max_db = 24.0;
  rx.clip_amp = 0.18;
  rx.sensitivity_amp = 0.0656;
  return rx;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"hallway_agc_on", "hallway_agc_off", "hall_agc_off"};
}

SimPreset preset(const std::string& name, std::uint64_t seed) {
  SimPreset p;
  p.scenario = ScenarioConfig::defaults(seed);
  if (name == "hallway_agc_on") {
    p.env = hallway_env();
    p.rx = receiver(true);
  } else if (name == "hallway_agc_off") {
    p.env = hallway_env();
    p.rx = receiver(false);
  } else if (name == "hall_agc_off") {
    p.env = hall_env();
    p.rx = receiver(false);
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + name + "' (available: " + known + ")");
  }
  return p;
}

namespace {

using nlohmann::json;

void merge_env(EnvironmentProfile& env, const json& j) {
  if (j.contains("name")) env.name = j.at("name").get<std::string>();
  if (j.contains("pl_exponent")) env.pl_exponent = j.at("pl_exponent").get<double>();
  if (j.contains("pl_ref_db")) env.pl_ref_db = j.at("pl_ref_db").get<double>();
  if (j.contains("shadowing_sigma_db"))
    env.shadowing_sigma_db = j.at("shadowing_sigma_db").get<double>();
  if (j.contains("noise_floor_amp"))
    env.noise_floor_amp = j.at("noise_floor_amp").get<double>();
  if (j.contains("taps")) {
    env.taps.clear();
    for (const auto& t : j.at("taps")) {
      MultipathTap tap;
      tap.excess_delay_ns = t.at("excess_delay_ns").get<int>();
      tap.relative_power_db = t.at("relative_power_db").get<double>();
      tap.jitter_db = t.value("jitter_db", 0.0);
      env.taps.push_back(tap);
    }
  }
}

void merge_rx(ReceiverProfile& rx, const json& j) {
  if (j.contains("agc_on")) rx.agc_on = j.at("agc_on").get<bool>();
  if (j.contains("agc_target_amp"))
    rx.agc_target_amp = j.at("agc_target_amp").get<double>();
  if (j.contains("agc_gain_min_db"))
    rx.agc_gain_min_db = j.at("agc_gain_min_db").get<double>();
  if (j.contains("agc_gain_max_db"))
    rx.agc_gain_max_db = j.at("agc_gain_max_db").get<double>();
  if (j.contains("clip_amp")) rx.clip_amp = j.at("clip_amp").get<double>();
  if (j.contains("sensitivity_amp"))
    rx.sensitivity_amp = j.at("sensitivity_amp").get<double>();
}

void merge_scenario(ScenarioConfig& sc, const json& j) {
  if (j.contains("distances_m"))
    sc.distances_m = j.at("distances_m").get<std::vector<double>>();
  if (j.contains("gains_db"))
    sc.gains_db = j.at("gains_db").get<std::vector<double>>();
  if (j.contains("packets_per_cell"))
    sc.packets_per_cell = j.at("packets_per_cell").get<int>();
}

}  // namespace

SimPreset load_sim_config(const std::string& path, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  try {
    SimPreset p = preset(j.value("preset", "hallway_agc_off"), seed);
    if (j.contains("env")) merge_env(p.env, j.at("env"));
    if (j.contains("rx")) merge_rx(p.rx, j.at("rx"));
    if (j.contains("scenario")) merge_scenario(p.scenario, j.at("scenario"));
    p.scenario.seed = seed;
    return p;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace uwbrss
