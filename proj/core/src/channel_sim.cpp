#include "uwbrss/channel_sim.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "uwbrss/errors.hpp"

namespace uwbrss {

void EnvironmentProfile::validate() const {
  if (!(pl_exponent > 0.0)) throw InvariantViolation("pl_exponent must be > 0");
  if (!(shadowing_sigma_db >= 0.0))
    throw InvariantViolation("shadowing_sigma_db must be >= 0");
  if (!(noise_floor_amp >= 0.0))
    throw InvariantViolation("noise_floor_amp must be >= 0");
  for (const auto& tap : taps) {
    if (tap.excess_delay_ns < 1)
      throw InvariantViolation("tap excess delay must be >= 1 ns");
    if (tap.excess_delay_ns >= kCirLength - kFirstPathIndex)
      throw InvariantViolation("tap excess delay falls outside the CIR window");
    if (!(tap.relative_power_db <= 0.0))
      throw InvariantViolation("tap relative power must be <= 0 dB");
    if (!(tap.jitter_db >= 0.0))
      throw InvariantViolation("tap jitter must be >= 0 dB");
  }
}

void ReceiverProfile::validate() const {
  if (!(agc_target_amp > 0.0))
    throw InvariantViolation("agc_target_amp must be > 0");
  if (!(agc_gain_min_db <= agc_gain_max_db))
    throw InvariantViolation("AGC gain clamp range is inverted");
  if (!(clip_amp > 0.0)) throw InvariantViolation("clip_amp must be > 0");
  if (agc_on && !(clip_amp >= agc_target_amp))
    throw InvariantViolation("clip_amp must be >= agc_target_amp");
  if (!(sensitivity_amp >= 0.0))
    throw InvariantViolation("sensitivity_amp must be >= 0");
}

ScenarioConfig ScenarioConfig::defaults(std::uint64_t seed) {
  ScenarioConfig sc;
  for (int i = 1; i <= 13; ++i) sc.distances_m.push_back(i * 0.5);
  sc.gains_db = full_gain_grid();
  sc.packets_per_cell = 16;
  sc.seed = seed;
  return sc;
}

void ScenarioConfig::validate() const {
  if (distances_m.empty()) throw InvariantViolation("no distances configured");
  for (double d : distances_m)
    if (!(d > 0.0)) throw NonPositiveDistance("distance must be > 0 m");
  if (gains_db.empty()) throw InvariantViolation("no gains configured");
  for (double g : gains_db)
    if (!on_gain_grid(g))
      throw InvariantViolation("gain off the 0.5 dB grid [0, 33.5]");
  if (packets_per_cell < 1)
    throw InvariantViolation("packets_per_cell must be >= 1");
}

double first_path_amplitude(const EnvironmentProfile& env, double distance_m,
                            double gain_db, double shadow_draw_db) {
  if (!(distance_m > 0.0)) throw NonPositiveDistance("distance must be > 0 m");
  double db = gain_db - env.pl_ref_db -
              10.0 * env.pl_exponent * std::log10(distance_m) + shadow_draw_db;
  return std::pow(10.0, db / 20.0);
}

SynthCir synth_cir(const EnvironmentProfile& env, const ReceiverProfile& rx,
                   double distance_m, double gain_db, Rng& rng) {
  SynthCir out;
  double shadow = rng.normal(env.shadowing_sigma_db);
  double fp = first_path_amplitude(env, distance_m, gain_db, shadow);
  out.pre_agc_fp_amp = fp;

  double phase = rng.angle();
  out.samples[kFirstPathIndex] = std::polar(fp, phase);
  for (const auto& tap : env.taps) {
    double jitter = rng.normal(tap.jitter_db);
    double amp = fp * std::pow(10.0, (tap.relative_power_db + jitter) / 20.0);
    out.samples[kFirstPathIndex + tap.excess_delay_ns] +=
        std::polar(amp, rng.angle());
  }
  if (env.noise_floor_amp > 0.0) {
    for (auto& s : out.samples)
      s += std::complex<double>(rng.normal(env.noise_floor_amp),
                                rng.normal(env.noise_floor_amp));
  }

  if (rx.agc_on) {
    double peak = 0.0;
    for (const auto& s : out.samples) peak = std::max(peak, std::abs(s));
    if (peak > 0.0) {
      double g = 20.0 * std::log10(rx.agc_target_amp / peak);
      g = std::clamp(g, rx.agc_gain_min_db, rx.agc_gain_max_db);
      double scale = std::pow(10.0, g / 20.0);
      for (auto& s : out.samples) s *= scale;
      out.agc_gain_db = g;
    }
  }

  for (auto& s : out.samples) {
    double mag = std::abs(s);
    if (mag > rx.clip_amp) s *= rx.clip_amp / mag;
  }
  return out;
}

RegisterSet extract_registers(std::span<const std::complex<double>> cir) {
  double peak = 0.0;
  std::size_t peak_idx = 0;
  for (std::size_t k = 0; k < cir.size(); ++k) {
    double mag = std::abs(cir[k]);
    if (mag > peak) {
      peak = mag;
      peak_idx = k;
    }
  }
  if (peak == 0.0) throw AllZeroCir();

  std::size_t fp_idx = 0;
  for (; fp_idx < cir.size(); ++fp_idx)
    if (std::abs(cir[fp_idx]) >= 0.5 * peak) break;

  auto mag_at = [&](std::size_t k) {
    return k < cir.size() ? std::abs(cir[k]) : 0.0;
  };
  RegisterSet regs;
  regs.fp_ampl1 = mag_at(fp_idx);
  regs.fp_ampl2 = mag_at(fp_idx + 1);
  regs.fp_ampl3 = mag_at(fp_idx + 2);
  regs.fppl_db = 10.0 * std::log10(regs.fp_ampl1 * regs.fp_ampl1 +
                                   regs.fp_ampl2 * regs.fp_ampl2 +
                                   regs.fp_ampl3 * regs.fp_ampl3);
  double total = 0.0;
  for (const auto& s : cir) total += std::norm(s);
  regs.rssi_db = 10.0 * std::log10(total);
  regs.fp_idx = static_cast<double>(fp_idx);
  regs.lde_ppindx = static_cast<double>(peak_idx);
  regs.lde_ppampl = peak;
  return regs;
}

CirRecord simulate_packet(const EnvironmentProfile& env,
                          const ReceiverProfile& rx, double distance_m,
                          double gain_db, Rng& rng) {
  SynthCir synth = synth_cir(env, rx, distance_m, gain_db, rng);

  CirRecord rec;
  rec.env_id = env.name;
  rec.rx_id = 0;
  rec.true_distance_m = distance_m;
  rec.tx_gain_db = gain_db;
  rec.agc_on = rx.agc_on;
  rec.delivered = synth.pre_agc_fp_amp >= rx.sensitivity_amp;
  if (rec.delivered) {
    rec.cir = synth.samples;
    RegisterSet regs = extract_registers(rec.cir);
    rec.fppl_db = regs.fppl_db;
    rec.rssi_db = regs.rssi_db;
    rec.fp_idx = regs.fp_idx;
    rec.lde_ppampl = regs.lde_ppampl;
    rec.lde_ppindx = regs.lde_ppindx;
    rec.fp_ampl1 = regs.fp_ampl1;
    rec.fp_ampl2 = regs.fp_ampl2;
    rec.fp_ampl3 = regs.fp_ampl3;
  } else {
    clear_features(rec);
  }
  return rec;
}

Dataset simulate(const EnvironmentProfile& env, const ReceiverProfile& rx,
                 const ScenarioConfig& scenario) {
  env.validate();
  rx.validate();
  scenario.validate();

  std::vector<CirRecord> records;
  records.reserve(scenario.distances_m.size() * scenario.gains_db.size() *
                  static_cast<std::size_t>(scenario.packets_per_cell));
  for (std::size_t di = 0; di < scenario.distances_m.size(); ++di) {
    for (std::size_t gi = 0; gi < scenario.gains_db.size(); ++gi) {
      for (int p = 0; p < scenario.packets_per_cell; ++p) {
        Rng rng = Rng::substream(scenario.seed, di, gi,
                                 static_cast<std::uint64_t>(p));
        records.push_back(simulate_packet(env, rx, scenario.distances_m[di],
                                          scenario.gains_db[gi], rng));
      }
    }
  }

  std::map<std::string, std::string> metadata;
  metadata["source"] = "simulate";
  metadata["env"] = env.name;
  metadata["seed"] = std::to_string(scenario.seed);
  return Dataset::validated(std::move(records), std::move(metadata));
}

double ambiguity_score(const Dataset& ds, const std::string& feature,
                       double gain_db) {
  auto field = [&]() -> double CirRecord::* {
    if (feature == "fppl_db") return &CirRecord::fppl_db;
    if (feature == "rssi_db") return &CirRecord::rssi_db;
    if (feature == "fp_idx") return &CirRecord::fp_idx;
    if (feature == "lde_ppampl") return &CirRecord::lde_ppampl;
    if (feature == "lde_ppindx") return &CirRecord::lde_ppindx;
    if (feature == "fp_ampl1") return &CirRecord::fp_ampl1;
    if (feature == "fp_ampl2") return &CirRecord::fp_ampl2;
    if (feature == "fp_ampl3") return &CirRecord::fp_ampl3;
    throw Error("unknown register feature: " + feature);
  }();

  std::vector<double> values;
  std::vector<std::int64_t> labels;
  std::int64_t gkey = gain_key(gain_db);
  for (const auto& rec : ds.records()) {
    if (!rec.delivered || gain_key(rec.tx_gain_db) != gkey) continue;
    values.push_back(rec.*field);
    labels.push_back(distance_key_mm(rec.true_distance_m));
  }

  std::set<std::int64_t> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2)
    throw InsufficientDistances(
        "ambiguity score needs >= 2 distances with delivered records at " +
        std::to_string(gain_db) + " dB");

  std::size_t correct = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    double best = 0.0;
    std::size_t best_j = values.size();
    for (std::size_t j = 0; j < values.size(); ++j) {
      if (j == i) continue;
      double dist = std::abs(values[i] - values[j]);
      if (best_j == values.size() || dist < best) {
        best = dist;
        best_j = j;
      }
    }
    if (labels[best_j] == labels[i]) ++correct;
  }
  return 1.0 - static_cast<double>(correct) / static_cast<double>(values.size());
}

}  // namespace uwbrss
