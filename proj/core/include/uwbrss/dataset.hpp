#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace uwbrss {

inline constexpr int kCirLength = 32;
// DW1000-style CIR: the first path lands on the 5th sample (index 4),
// 1 ns sample spacing.
inline constexpr int kFirstPathIndex = 4;

inline constexpr double kGainStepDb = 0.5;
inline constexpr double kMaxGainDb = 33.5;
inline constexpr int kGainCount = 68;

// The 68-step transmit gain grid {0, 0.5, ..., 33.5} dB.
std::vector<double> full_gain_grid();
bool on_gain_grid(double gain_db);

// Ground-truth distances are compared at 1 mm resolution.
std::int64_t distance_key_mm(double distance_m);
// Gains are compared on the 0.5 dB grid.
std::int64_t gain_key(double gain_db);

// Shortest decimal text that parses back to the same bits; used for all
// CSV and JSON number output.
std::string format_double(double v);

// One received (or lost) packet. Feature fields are NaN and the CIR is
// all zeros when delivered is false.
struct CirRecord {
  std::string env_id;
  int rx_id = 0;
  double true_distance_m = 0.0;
  double tx_gain_db = 0.0;
  bool agc_on = false;
  bool delivered = false;

  double fppl_db = 0.0;
  double rssi_db = 0.0;
  double fp_idx = 0.0;
  double lde_ppampl = 0.0;
  double lde_ppindx = 0.0;
  double fp_ampl1 = 0.0;
  double fp_ampl2 = 0.0;
  double fp_ampl3 = 0.0;

  std::array<std::complex<double>, kCirLength> cir{};
};

// Marks every feature field of an undelivered record as absent.
void clear_features(CirRecord& rec);

// Immutable ordered collection of records sharing one AGC state.
class Dataset {
 public:
  Dataset() = default;

  // Checks per-record and dataset-level invariants: gains on the grid,
  // positive distances, a single AGC state, and at least one delivered
  // record per distance.
  static Dataset validated(std::vector<CirRecord> records,
                           std::map<std::string, std::string> metadata = {});

  // No validation; for derived views (filter, split halves) whose source
  // already passed validation.
  static Dataset unchecked(std::vector<CirRecord> records,
                           std::map<std::string, std::string> metadata = {});

  const std::vector<CirRecord>& records() const { return records_; }
  const std::map<std::string, std::string>& metadata() const {
    return metadata_;
  }

  bool empty() const { return records_.empty(); }
  std::size_t size() const { return records_.size(); }

  // Sorted unique ground-truth distances (1 mm resolution).
  std::vector<double> distances() const;
  // Sorted unique transmit gains.
  std::vector<double> gains() const;
  // AGC state shared by all records; requires a non-empty dataset.
  bool agc_on() const;

 private:
  std::vector<CirRecord> records_;
  std::map<std::string, std::string> metadata_;
};

// Canonical CSV schema; see save_csv for the exact header. Loading
// validates the same invariants as Dataset::validated and reports
// offending rows by 1-based file line.
Dataset load_csv(const std::string& path);

// Foreign CSVs: mapping renames their header names to canonical ones
// ({"their_col": "our_col"}); after renaming, the full canonical column
// set must be present, in any order. Boolean cells accept 0/1/true/false.
Dataset load_csv(const std::string& path,
                 const std::map<std::string, std::string>& column_mapping);

// Writes the canonical schema with shortest round-trip number formatting;
// feature cells of undelivered records are left empty.
void save_csv(const Dataset& ds, const std::string& path);

// Deterministic split, stratified by (distance, gain): each stratum
// contributes floor(train_fraction * n) of its delivered records to the
// train half and the rest to test. Undelivered records in a stratum are
// split by the same rule. Throws EmptyStratum if a present stratum has no
// delivered records. Record order is preserved within both halves.
std::pair<Dataset, Dataset> split_train_test(const Dataset& ds,
                                             double train_fraction,
                                             std::uint64_t seed);

using RecordPredicate = std::function<bool(const CirRecord&)>;

// Keeps records satisfying the predicate; order and metadata preserved.
// May return an empty dataset.
Dataset filter(const Dataset& ds, const RecordPredicate& pred);

// Lowest gain with at least one delivered record, per distance. Throws
// NoDeliveredRecords if some present distance has none.
std::map<double, double> min_gain_table(const Dataset& ds);

}  // namespace uwbrss
