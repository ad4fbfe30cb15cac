#pragma once

#include <array>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "uwbrss/dataset.hpp"
#include "uwbrss/rng.hpp"

namespace uwbrss {

// One echo after the first path. relative_power_db is w.r.t. the first
// path (<= 0); jitter_db is the std of a per-packet Gaussian wiggle on it.
struct MultipathTap {
  int excess_delay_ns = 1;  // >= 1, first path sits at kFirstPathIndex
  double relative_power_db = 0.0;
  double jitter_db = 0.0;
};

struct EnvironmentProfile {
  std::string name;
  double pl_exponent = 2.0;      // log-distance path loss exponent
  double pl_ref_db = 40.0;       // loss at 1 m, 0 dB gain
  double shadowing_sigma_db = 0.0;
  std::vector<MultipathTap> taps;
  double noise_floor_amp = 0.0;  // per-component Gaussian std added to every sample

  void validate() const;
};

struct ReceiverProfile {
  bool agc_on = false;
  double agc_target_amp = 0.15;
  double agc_gain_min_db = -24.0;
  double agc_gain_max_db = 24.0;
  double clip_amp = 0.25;        // magnitude ceiling, phase preserved
  double sensitivity_amp = 0.0;  // delivery threshold on the pre-AGC first path

  void validate() const;
};

struct ScenarioConfig {
  std::vector<double> distances_m;
  std::vector<double> gains_db;
  int packets_per_cell = 16;
  std::uint64_t seed = 0;

  // 13 distances 0.5..6.5 m and the full 68-step gain grid, 16 packets.
  static ScenarioConfig defaults(std::uint64_t seed);

  void validate() const;
};

// Deterministic first-path amplitude before receiver effects:
// A0 * 10^((gain - pl_ref - 10 n log10(d / 1 m) + shadow) / 20), A0 = 1.
double first_path_amplitude(const EnvironmentProfile& env, double distance_m,
                            double gain_db, double shadow_draw_db);

struct SynthCir {
  std::array<std::complex<double>, kCirLength> samples{};
  double pre_agc_fp_amp = 0.0;  // first-path amplitude before noise/AGC/clipping
  double agc_gain_db = 0.0;     // applied gain; 0 when AGC is off
};

// Draw order per packet: shadowing, first-path phase, per-tap (jitter,
// phase), then per-sample noise when noise_floor_amp > 0. The AGC stage
// scales all samples by clamp(20 log10(target / pre-AGC peak), min, max);
// clipping caps magnitudes at clip_amp afterwards.
SynthCir synth_cir(const EnvironmentProfile& env, const ReceiverProfile& rx,
                   double distance_m, double gain_db, Rng& rng);

struct RegisterSet {
  double fppl_db = 0.0;
  double rssi_db = 0.0;
  double fp_idx = 0.0;
  double lde_ppampl = 0.0;
  double lde_ppindx = 0.0;
  double fp_ampl1 = 0.0;
  double fp_ampl2 = 0.0;
  double fp_ampl3 = 0.0;
};

// DW1000-style register readouts from a CIR. The first path index is the
// earliest sample reaching half the peak magnitude; fppl is the 3-sample
// power from there, rssi the total power (calibration constants both 0).
RegisterSet extract_registers(std::span<const std::complex<double>> cir);

// One packet: delivered iff the pre-AGC first-path amplitude reaches
// rx.sensitivity_amp. Undelivered records carry no feature values.
CirRecord simulate_packet(const EnvironmentProfile& env,
                          const ReceiverProfile& rx, double distance_m,
                          double gain_db, Rng& rng);

// The full grid. Each (distance, gain, packet) cell draws from an
// independent substream of scenario.seed, so outputs are reproducible
// regardless of iteration order.
Dataset simulate(const EnvironmentProfile& env, const ReceiverProfile& rx,
                 const ScenarioConfig& scenario);

// 1 minus the leave-one-out 1-NN accuracy of classifying the distance
// label from one scalar register at one gain; ties go to the earliest
// record. 0 = fully separable, towards 1 = ambiguous.
double ambiguity_score(const Dataset& ds, const std::string& feature,
                       double gain_db);

// Named (environment, receiver, scenario) bundles.
struct SimPreset {
  EnvironmentProfile env;
  ReceiverProfile rx;
  ScenarioConfig scenario;
};

std::vector<std::string> preset_names();
SimPreset preset(const std::string& name, std::uint64_t seed);

// JSON file with optional "preset" plus env/rx/scenario overrides.
SimPreset load_sim_config(const std::string& path, std::uint64_t seed);

}  // namespace uwbrss
