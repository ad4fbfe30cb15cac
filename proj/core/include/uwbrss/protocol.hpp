#pragma once

#include <map>
#include <memory>
#include <vector>

#include "uwbrss/channel_sim.hpp"
#include "uwbrss/dataset.hpp"
#include "uwbrss/features.hpp"
#include "uwbrss/regressors.hpp"

namespace uwbrss {

// Two-phase sounding-packet ranging: a max-gain packet gives a coarse
// estimate; the follow-up packet is sent at the lowest gain known to
// reach the snapped distance, where amplitude features are unambiguous.
struct RangingSession {
  FeatureSpec spec;
  std::map<double, double> min_gain;  // calibration distance -> lowest delivered gain
  std::vector<double> grid;           // sorted calibration distances
  double sounding_gain_db = kMaxGainDb;
  std::unique_ptr<Regressor> coarse;  // trained on all delivered records
  std::unique_ptr<Regressor> fine;    // trained on min-gain records only
  Standardizer coarse_std;
  Standardizer fine_std;
};

// Training data must be AGC-off and every distance must have a delivered
// record at some gain (MissingGainCoverage otherwise).
RangingSession calibrate(const Dataset& train, const FeatureSpec& spec,
                         const RegressorFactory& make,
                         double sounding_gain_db = kMaxGainDb);

// Nearest grid value; exact midpoints resolve to the smaller distance.
double snap_to_grid(const std::vector<double>& grid, double value);

struct EstimateResult {
  double coarse_m = 0.0;
  double snapped_m = 0.0;
  double refined_m = 0.0;     // NaN when the refine phase never delivered
  double gain_used_db = 0.0;  // NaN when the refine phase never delivered
  int retries = 0;            // lost refine packets before one got through
  bool refined_delivered = false;
};

// Consumes exactly two simulated transmissions on success, plus one per
// retry: lost refine packets fall back one gain step up at a time until
// the grid tops out. Throws SoundingLost when the first packet is lost.
EstimateResult estimate(const RangingSession& session,
                        const EnvironmentProfile& env, const ReceiverProfile& rx,
                        double true_distance_m, Rng& rng);

}  // namespace uwbrss
