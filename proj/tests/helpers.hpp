#pragma once

// Small builders shared by the test suites.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "uwbrss/channel_sim.hpp"
#include "uwbrss/dataset.hpp"
#include "uwbrss/features.hpp"

namespace testutil {

// Delivered record with plausible register values derived from fppl.
inline uwbrss::CirRecord make_record(double distance_m, double gain_db,
                                     double fppl_db, bool delivered = true,
                                     const std::string& env = "lab") {
  uwbrss::CirRecord rec;
  rec.env_id = env;
  rec.rx_id = 0;
  rec.true_distance_m = distance_m;
  rec.tx_gain_db = gain_db;
  rec.agc_on = false;
  rec.delivered = delivered;
  if (delivered) {
    double amp = std::pow(10.0, fppl_db / 20.0);
    rec.fppl_db = fppl_db;
    rec.rssi_db = fppl_db + 1.0;
    rec.fp_idx = uwbrss::kFirstPathIndex;
    rec.lde_ppampl = amp;
    rec.lde_ppindx = uwbrss::kFirstPathIndex;
    rec.fp_ampl1 = amp;
    rec.fp_ampl2 = amp * 0.5;
    rec.fp_ampl3 = amp * 0.25;
    rec.cir[uwbrss::kFirstPathIndex] = {amp, 0.0};
  } else {
    uwbrss::clear_features(rec);
  }
  return rec;
}

// Literal feature matrices for regressor tests.
inline uwbrss::FeatureMatrix make_matrix(
    const std::vector<std::vector<double>>& rows,
    const std::vector<double>& targets,
    const std::vector<double>& gains = {}) {
  uwbrss::FeatureMatrix m;
  m.n_rows = rows.size();
  m.n_cols = rows.empty() ? 0 : rows[0].size();
  for (std::size_t j = 0; j < m.n_cols; ++j)
    m.column_names.push_back("x" + std::to_string(j));
  for (const auto& row : rows)
    m.values.insert(m.values.end(), row.begin(), row.end());
  m.targets = targets;
  m.gains = gains.empty() ? std::vector<double>(m.n_rows, 33.5) : gains;
  return m;
}

// Unique path under the system temp dir; removed by the caller.
inline std::string temp_path(const std::string& stem) {
  static int counter = 0;
  auto dir = std::filesystem::temp_directory_path() / "uwbrss_tests";
  std::filesystem::create_directories(dir);
  return (dir / (stem + "_" + std::to_string(counter++) + ".tmp")).string();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

// Noise-free copy of an environment: shadowing and tap jitter zeroed.
inline uwbrss::EnvironmentProfile frozen(uwbrss::EnvironmentProfile env) {
  env.shadowing_sigma_db = 0.0;
  for (auto& tap : env.taps) tap.jitter_db = 0.0;
  return env;
}

}  // namespace testutil
