// Covered here:
//   - snap_to_grid geometry including midpoint ties and clamping
//   - calibrate: min-gain table correctness, input validation, the
//     single-gain degenerate case
//   - estimate under a noise-free channel: exact recall at calibration
//     distances, the deterministic fallback ladder, retry accounting,
//     SoundingLost, coarse/refined agreement when clipping is disabled
//   - determinism of full estimate runs

#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "uwbrss/channel_sim.hpp"
#include "uwbrss/errors.hpp"
#include "uwbrss/protocol.hpp"

using namespace uwbrss;
using testutil::frozen;
using testutil::make_record;

namespace {

// Noise-free default-grid simulation and its matching profiles.
struct Rig {
  EnvironmentProfile env;
  ReceiverProfile rx;
  Dataset train;
};

Rig noise_free_rig(std::uint64_t seed = 3, int packets = 2) {
  SimPreset p = preset("hallway_agc_off", seed);
  p.env = frozen(p.env);
  p.scenario.packets_per_cell = packets;
  return {p.env, p.rx, simulate(p.env, p.rx, p.scenario)};
}

RangingSession calibrate_rig(const Rig& rig,
                             const std::string& features = "fppl_gain") {
  return calibrate(rig.train, FeatureSpec::preset(features),
                   regressor_factory("knn"));
}

}  // namespace

TEST_CASE("snap_to_grid geometry") {
  std::vector<double> grid;
  for (int i = 1; i <= 13; ++i) grid.push_back(i * 0.5);

  CHECK(snap_to_grid(grid, 2.74) == 2.5);
  CHECK(snap_to_grid(grid, 2.76) == 3.0);
  CHECK(snap_to_grid(grid, 2.75) == 2.5);  // exact midpoint: smaller wins
  CHECK(snap_to_grid(grid, 0.1) == 0.5);
  CHECK(snap_to_grid(grid, 99.0) == 6.5);
  CHECK(snap_to_grid(grid, 4.0) == 4.0);
  CHECK(snap_to_grid({2.0}, -5.0) == 2.0);
}

TEST_CASE("calibrate builds the min-gain table from delivered records") {
  Rig rig = noise_free_rig();
  RangingSession session = calibrate_rig(rig);

  REQUIRE(session.grid.size() == 13);
  CHECK(session.grid.front() == 0.5);
  CHECK(session.grid.back() == 6.5);
  CHECK(session.sounding_gain_db == kMaxGainDb);

  // Independent recomputation of the lowest delivered gain per distance.
  std::map<std::int64_t, double> expect;
  for (const auto& rec : rig.train.records()) {
    if (!rec.delivered) continue;
    auto key = distance_key_mm(rec.true_distance_m);
    auto it = expect.find(key);
    if (it == expect.end() || rec.tx_gain_db < it->second)
      expect[key] = rec.tx_gain_db;
  }
  REQUIRE(session.min_gain.size() == expect.size());
  for (const auto& [d, g] : session.min_gain)
    CHECK(g == expect.at(distance_key_mm(d)));

  // Far distances need more gain.
  CHECK(session.min_gain.at(6.5) > session.min_gain.at(0.5));
}

TEST_CASE("calibrate validates its inputs") {
  Rig rig = noise_free_rig();
  FeatureSpec spec = FeatureSpec::preset("fppl_gain");

  CHECK_THROWS_AS(calibrate(Dataset(), spec, regressor_factory("knn")),
                  NoDeliveredRecords);

  SUBCASE("AGC-on data is rejected") {
    SimPreset p = preset("hallway_agc_on", 3);
    p.scenario.distances_m = {0.5, 1.0, 1.5};
    p.scenario.gains_db = {26.0, 33.5};
    p.scenario.packets_per_cell = 2;
    Dataset agc = simulate(p.env, p.rx, p.scenario);
    CHECK_THROWS_AS(calibrate(agc, spec, regressor_factory("knn")),
                    InvariantViolation);
  }
  SUBCASE("off-grid sounding gain") {
    CHECK_THROWS_AS(
        calibrate(rig.train, spec, regressor_factory("knn"), 13.3),
        InvariantViolation);
  }
  SUBCASE("a distance with no delivered record") {
    std::vector<CirRecord> recs = {make_record(1.0, 20.0, -5.0),
                                   make_record(4.0, 33.5, 0.0, false)};
    CHECK_THROWS_AS(
        calibrate(Dataset::unchecked(recs), spec, regressor_factory("knn")),
        MissingGainCoverage);
  }
}

TEST_CASE("noise-free estimate recalls calibration distances exactly") {
  Rig rig = noise_free_rig();
  RangingSession session = calibrate_rig(rig);

  Rng rng = Rng::substream(99, 1, 2, 3);
  EstimateResult res = estimate(session, rig.env, rig.rx, 3.0, rng);

  CHECK(res.coarse_m == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(res.snapped_m == 3.0);
  CHECK(res.refined_delivered);
  CHECK(res.refined_m == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(res.retries == 0);
  CHECK(res.gain_used_db == session.min_gain.at(3.0));
}

TEST_CASE("estimate is deterministic given the rng substream") {
  Rig rig = noise_free_rig();
  RangingSession session = calibrate_rig(rig);

  Rng a = Rng::substream(7, 0, 0, 0);
  Rng b = Rng::substream(7, 0, 0, 0);
  EstimateResult ra = estimate(session, rig.env, rig.rx, 4.2, a);
  EstimateResult rb = estimate(session, rig.env, rig.rx, 4.2, b);
  CHECK(ra.coarse_m == rb.coarse_m);
  CHECK(ra.snapped_m == rb.snapped_m);
  CHECK(ra.refined_m == rb.refined_m);
  CHECK(ra.gain_used_db == rb.gain_used_db);
  CHECK(ra.retries == rb.retries);
}

TEST_CASE("fallback climbs one gain step per lost probe") {
  // At 6.2 m the coarse phase snaps to 6.0 m whose table gain cannot reach
  // the true distance; the first retry half-step up succeeds.
  Rig rig = noise_free_rig();
  RangingSession session = calibrate_rig(rig);
  REQUIRE(session.min_gain.at(6.0) == 32.0);

  Rng rng = Rng::substream(5, 0, 0, 0);
  EstimateResult res = estimate(session, rig.env, rig.rx, 6.2, rng);

  CHECK(res.coarse_m == doctest::Approx(6.0).epsilon(1e-9));
  CHECK(res.snapped_m == 6.0);
  CHECK(res.retries == 1);
  CHECK(res.refined_delivered);
  CHECK(res.gain_used_db == 32.5);
  // In feature space the retried probe sits closest to the 6.5 m fine rows.
  CHECK(res.refined_m == doctest::Approx(6.5).epsilon(1e-9));
}

TEST_CASE("gain_used never undercuts the table entry") {
  SimPreset p = preset("hallway_agc_off", 41);
  p.scenario.packets_per_cell = 4;
  Dataset train = simulate(p.env, p.rx, p.scenario);
  RangingSession session = calibrate(train, FeatureSpec::preset("fppl_gain"),
                                     regressor_factory("knn"));

  int used = 0;
  for (int i = 0; i < 40; ++i) {
    Rng rng = Rng::substream(17, static_cast<std::uint64_t>(i), 0, 0);
    double d = 0.5 + 6.0 * (i / 39.0);
    try {
      EstimateResult res = estimate(session, p.env, p.rx, d, rng);
      if (!res.refined_delivered) continue;
      ++used;
      CHECK(res.gain_used_db >= session.min_gain.at(res.snapped_m));
      CHECK(on_gain_grid(res.gain_used_db));
      CHECK(res.retries >= 0);
    } catch (const SoundingLost&) {
      // acceptable for the farthest queries under shadowing
    }
  }
  CHECK(used > 30);
}

TEST_CASE("sounding loss raises instead of guessing") {
  Rig rig = noise_free_rig();
  RangingSession session = calibrate_rig(rig);

  ReceiverProfile deaf = rig.rx;
  deaf.sensitivity_amp = 1e9;
  Rng rng(1);
  CHECK_THROWS_AS(estimate(session, rig.env, deaf, 3.0, rng), SoundingLost);
}

TEST_CASE("without clipping the two phases agree at grid distances") {
  SimPreset p = preset("hallway_agc_off", 6);
  p.env = frozen(p.env);
  p.rx.clip_amp = 1e9;
  p.scenario.packets_per_cell = 2;
  Dataset train = simulate(p.env, p.rx, p.scenario);
  RangingSession session = calibrate(train, FeatureSpec::preset("fppl_gain"),
                                     regressor_factory("knn"));

  for (double d : {1.0, 2.0, 4.5, 6.0}) {
    Rng rng = Rng::substream(23, distance_key_mm(d), 0, 0);
    EstimateResult res = estimate(session, p.env, p.rx, d, rng);
    CHECK(res.coarse_m == doctest::Approx(d).epsilon(1e-9));
    CHECK(res.refined_m == doctest::Approx(d).epsilon(1e-9));
    CHECK(res.refined_m == doctest::Approx(res.coarse_m).epsilon(1e-9));
  }
}

TEST_CASE("single-gain calibration collapses both phases") {
  SimPreset p = preset("hallway_agc_off", 8);
  p.env = frozen(p.env);
  p.scenario.gains_db = {kMaxGainDb};
  p.scenario.packets_per_cell = 2;
  Dataset train = simulate(p.env, p.rx, p.scenario);
  RangingSession session = calibrate(train, FeatureSpec::preset("fppl_gain"),
                                     regressor_factory("knn"));

  for (const auto& [d, g] : session.min_gain) CHECK(g == kMaxGainDb);

  Rng rng(2);
  EstimateResult res = estimate(session, p.env, p.rx, 4.0, rng);
  CHECK(res.gain_used_db == kMaxGainDb);
  CHECK(res.coarse_m == doctest::Approx(4.0).epsilon(1e-9));
  // Coarse and fine saw identical training rows; both average the two
  // 4.0 m neighbours, so the estimates agree to the bit.
  CHECK(res.refined_m == res.coarse_m);
}
