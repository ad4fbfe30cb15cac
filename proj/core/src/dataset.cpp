#include "uwbrss/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "uwbrss/errors.hpp"
#include "uwbrss/rng.hpp"

namespace uwbrss {

std::vector<double> full_gain_grid() {
  std::vector<double> grid(kGainCount);
  for (int i = 0; i < kGainCount; ++i) grid[i] = i * kGainStepDb;
  return grid;
}

bool on_gain_grid(double gain_db) {
  if (!(gain_db >= 0.0 && gain_db <= kMaxGainDb)) return false;
  double steps = gain_db / kGainStepDb;
  return std::abs(steps - std::round(steps)) < 1e-9;
}

std::int64_t distance_key_mm(double distance_m) {
  return static_cast<std::int64_t>(std::llround(distance_m * 1000.0));
}

std::int64_t gain_key(double gain_db) {
  return static_cast<std::int64_t>(std::llround(gain_db / kGainStepDb));
}

void clear_features(CirRecord& rec) {
  double nan = std::nan("");
  rec.fppl_db = nan;
  rec.rssi_db = nan;
  rec.fp_idx = nan;
  rec.lde_ppampl = nan;
  rec.lde_ppindx = nan;
  rec.fp_ampl1 = nan;
  rec.fp_ampl2 = nan;
  rec.fp_ampl3 = nan;
  rec.cir.fill({0.0, 0.0});
}

namespace {

void check_record(const CirRecord& rec, std::size_t row) {
  if (!(rec.true_distance_m > 0.0))
    throw InvariantViolation(row, "true_distance_m must be positive");
  if (!on_gain_grid(rec.tx_gain_db))
    throw InvariantViolation(row, "tx_gain_db is off the 0.5 dB grid [0, 33.5]");
  if (rec.rx_id != 0 && rec.rx_id != 1)
    throw InvariantViolation(row, "rx_id must be 0 or 1");
  if (rec.delivered) {
    for (double a : {rec.fp_ampl1, rec.fp_ampl2, rec.fp_ampl3, rec.lde_ppampl}) {
      if (!(a >= 0.0))
        throw InvariantViolation(row, "amplitude registers must be >= 0");
    }
    for (double v : {rec.fppl_db, rec.rssi_db, rec.fp_idx, rec.lde_ppindx}) {
      if (!std::isfinite(v))
        throw InvariantViolation(row, "delivered record with non-finite feature");
    }
  }
}

void check_dataset(const std::vector<CirRecord>& records) {
  if (records.empty()) return;
  bool agc = records.front().agc_on;
  for (const auto& rec : records) {
    if (rec.agc_on != agc)
      throw MixedAgcState("dataset mixes AGC-on and AGC-off records");
  }
  std::set<std::int64_t> seen;
  std::set<std::int64_t> delivered;
  for (const auto& rec : records) {
    std::int64_t key = distance_key_mm(rec.true_distance_m);
    seen.insert(key);
    if (rec.delivered) delivered.insert(key);
  }
  for (std::int64_t key : seen) {
    if (!delivered.count(key))
      throw InvariantViolation("distance " + std::to_string(key / 1000.0) +
                               " m has no delivered record");
  }
}

}  // namespace

Dataset Dataset::validated(std::vector<CirRecord> records,
                           std::map<std::string, std::string> metadata) {
  for (std::size_t i = 0; i < records.size(); ++i) check_record(records[i], i + 1);
  check_dataset(records);
  return unchecked(std::move(records), std::move(metadata));
}

Dataset Dataset::unchecked(std::vector<CirRecord> records,
                           std::map<std::string, std::string> metadata) {
  Dataset ds;
  ds.records_ = std::move(records);
  ds.metadata_ = std::move(metadata);
  return ds;
}

std::vector<double> Dataset::distances() const {
  std::set<std::int64_t> keys;
  for (const auto& rec : records_) keys.insert(distance_key_mm(rec.true_distance_m));
  std::vector<double> out;
  out.reserve(keys.size());
  for (std::int64_t key : keys) out.push_back(static_cast<double>(key) / 1000.0);
  return out;
}

std::vector<double> Dataset::gains() const {
  std::set<std::int64_t> keys;
  for (const auto& rec : records_) keys.insert(gain_key(rec.tx_gain_db));
  std::vector<double> out;
  out.reserve(keys.size());
  for (std::int64_t key : keys) out.push_back(static_cast<double>(key) * kGainStepDb);
  return out;
}

bool Dataset::agc_on() const {
  if (records_.empty()) throw Error("agc_on() on empty dataset");
  return records_.front().agc_on;
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& ds,
                                             double train_fraction,
                                             std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error("train_fraction must be in (0, 1)");

  struct Stratum {
    std::vector<std::size_t> delivered;
    std::vector<std::size_t> undelivered;
  };
  std::map<std::pair<std::int64_t, std::int64_t>, Stratum> strata;
  const auto& records = ds.records();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    auto key = std::make_pair(distance_key_mm(rec.true_distance_m),
                              gain_key(rec.tx_gain_db));
    if (rec.delivered)
      strata[key].delivered.push_back(i);
    else
      strata[key].undelivered.push_back(i);
  }

  std::vector<bool> in_train(records.size(), false);
  auto assign = [&](std::vector<std::size_t>& idx, Rng& rng) {
    for (std::size_t i = idx.size(); i > 1; --i)
      std::swap(idx[i - 1], idx[rng.next_u64() % i]);
    auto n_train = static_cast<std::size_t>(
        std::floor(train_fraction * static_cast<double>(idx.size())));
    for (std::size_t i = 0; i < n_train; ++i) in_train[idx[i]] = true;
  };

  for (auto& [key, stratum] : strata) {
    if (stratum.delivered.empty())
      throw EmptyStratum(static_cast<double>(key.first) / 1000.0,
                         static_cast<double>(key.second) * kGainStepDb);
    auto a = static_cast<std::uint64_t>(key.first);
    auto b = static_cast<std::uint64_t>(key.second);
    Rng rng_d = Rng::substream(seed, a, b, 0);
    assign(stratum.delivered, rng_d);
    Rng rng_u = Rng::substream(seed, a, b, 1);
    assign(stratum.undelivered, rng_u);
  }

  std::vector<CirRecord> train, test;
  for (std::size_t i = 0; i < records.size(); ++i)
    (in_train[i] ? train : test).push_back(records[i]);
  return {Dataset::unchecked(std::move(train), ds.metadata()),
          Dataset::unchecked(std::move(test), ds.metadata())};
}

Dataset filter(const Dataset& ds, const RecordPredicate& pred) {
  std::vector<CirRecord> kept;
  for (const auto& rec : ds.records())
    if (pred(rec)) kept.push_back(rec);
  return Dataset::unchecked(std::move(kept), ds.metadata());
}

std::map<double, double> min_gain_table(const Dataset& ds) {
  if (ds.empty()) throw NoDeliveredRecords("empty dataset");
  std::map<std::int64_t, std::int64_t> best;
  std::set<std::int64_t> seen;
  for (const auto& rec : ds.records()) {
    std::int64_t dkey = distance_key_mm(rec.true_distance_m);
    seen.insert(dkey);
    if (!rec.delivered) continue;
    std::int64_t g = gain_key(rec.tx_gain_db);
    auto it = best.find(dkey);
    if (it == best.end() || g < it->second) best[dkey] = g;
  }
  for (std::int64_t dkey : seen) {
    if (!best.count(dkey))
      throw NoDeliveredRecords("no delivered record at any gain for distance " +
                               std::to_string(dkey / 1000.0) + " m");
  }
  std::map<double, double> table;
  for (auto [dkey, g] : best)
    table[static_cast<double>(dkey) / 1000.0] =
        static_cast<double>(g) * kGainStepDb;
  return table;
}

}  // namespace uwbrss
