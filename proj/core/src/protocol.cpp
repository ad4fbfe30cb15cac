#include "uwbrss/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "uwbrss/errors.hpp"

namespace uwbrss {

RangingSession calibrate(const Dataset& train, const FeatureSpec& spec,
                         const RegressorFactory& make, double sounding_gain_db) {
  if (train.empty()) throw NoDeliveredRecords("empty calibration dataset");
  if (train.agc_on())
    throw InvariantViolation("protocol calibration requires AGC-off data");
  if (!on_gain_grid(sounding_gain_db))
    throw InvariantViolation("sounding gain off the 0.5 dB grid");

  std::set<std::int64_t> seen, covered;
  for (const auto& rec : train.records()) {
    std::int64_t key = distance_key_mm(rec.true_distance_m);
    seen.insert(key);
    if (rec.delivered) covered.insert(key);
  }
  for (std::int64_t key : seen)
    if (!covered.count(key))
      throw MissingGainCoverage(static_cast<double>(key) / 1000.0);

  RangingSession session;
  session.spec = spec;
  session.sounding_gain_db = sounding_gain_db;
  session.min_gain = min_gain_table(train);
  for (const auto& [distance, gain] : session.min_gain)
    session.grid.push_back(distance);

  Dataset delivered =
      filter(train, [](const CirRecord& rec) { return rec.delivered; });
  Dataset fine_set = filter(delivered, [&](const CirRecord& rec) {
    double g = session.min_gain.at(
        static_cast<double>(distance_key_mm(rec.true_distance_m)) / 1000.0);
    return gain_key(rec.tx_gain_db) == gain_key(g);
  });

  FeatureMatrix coarse_m = build_matrix(delivered, spec);
  FeatureMatrix fine_m = build_matrix(fine_set, spec);
  session.coarse_std = spec.standardize
                           ? fit_standardizer(coarse_m, {"tx_gain_db"})
                           : Standardizer::identity(coarse_m);
  session.fine_std = spec.standardize ? fit_standardizer(fine_m, {"tx_gain_db"})
                                      : Standardizer::identity(fine_m);
  if (spec.standardize) {
    coarse_m = apply_standardizer(session.coarse_std, std::move(coarse_m));
    fine_m = apply_standardizer(session.fine_std, std::move(fine_m));
  }
  session.coarse = make();
  session.coarse->train(coarse_m);
  session.fine = make();
  session.fine->train(fine_m);
  return session;
}

double snap_to_grid(const std::vector<double>& grid, double value) {
  if (grid.empty()) throw Error("empty calibration grid");
  double best = grid.front();
  double best_err = std::abs(value - best);
  for (double d : grid) {
    double err = std::abs(value - d);
    // strict improvement keeps the smaller distance on exact midpoints
    if (err < best_err) {
      best = d;
      best_err = err;
    }
  }
  return best;
}

EstimateResult estimate(const RangingSession& session,
                        const EnvironmentProfile& env, const ReceiverProfile& rx,
                        double true_distance_m, Rng& rng) {
  CirRecord sounding =
      simulate_packet(env, rx, true_distance_m, session.sounding_gain_db, rng);
  if (!sounding.delivered) throw SoundingLost();

  EstimateResult result;
  std::vector<double> row = feature_row(sounding, session.spec);
  if (session.spec.standardize) apply_standardizer_row(session.coarse_std, row);
  result.coarse_m = session.coarse->predict(row);
  result.snapped_m = snap_to_grid(session.grid, result.coarse_m);

  double gain = session.min_gain.at(result.snapped_m);
  result.refined_m = std::nan("");
  result.gain_used_db = std::nan("");
  while (true) {
    CirRecord probe = simulate_packet(env, rx, true_distance_m, gain, rng);
    if (probe.delivered) {
      std::vector<double> fine_row = feature_row(probe, session.spec);
      if (session.spec.standardize)
        apply_standardizer_row(session.fine_std, fine_row);
      result.refined_m = session.fine->predict(fine_row);
      result.gain_used_db = gain;
      result.refined_delivered = true;
      break;
    }
    if (gain_key(gain) >= gain_key(kMaxGainDb)) break;
    gain += kGainStepDb;
    ++result.retries;
  }
  return result;
}

}  // namespace uwbrss
