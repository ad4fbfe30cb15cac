// Covered here:
//   - make_report hand values: per-distance averaging vs sample weighting
//   - duplication invariance of averaged_mae (bit-identical) while
//     overall_mae moves
//   - RMSE >= overall MAE on random inputs, perfect-predictor zeros
//   - evaluate() consistency with manual predictions
//   - split_evaluation determinism
//   - transfer_study cell layout, degenerate identical-environment case,
//     environment mismatch errors
//   - leave-one-distance-out: fold count, exact linear recovery, leakage
//     guard via TooFewDistances
//   - JSON/CSV serialization: structure, parsed values, determinism

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"
#include "uwbrss/channel_sim.hpp"
#include "uwbrss/errors.hpp"
#include "uwbrss/evaluation.hpp"

using namespace uwbrss;
using testutil::make_record;

namespace {

RegressorFactory knn2() { return regressor_factory("knn"); }

Dataset tiny_sim(std::uint64_t seed) {
  SimPreset p = preset("hallway_agc_off", seed);
  p.scenario.distances_m = {0.5, 1.0, 1.5, 2.0};
  p.scenario.gains_db = {26.0, 30.0, 33.5};
  p.scenario.packets_per_cell = 4;
  return simulate(p.env, p.rx, p.scenario);
}

}  // namespace

TEST_CASE("make_report hand values") {
  // Distance 1 m: errors 0.1 and 0.3; distance 2 m: error 0.2.
  std::vector<double> preds = {1.1, 0.7, 2.2};
  std::vector<double> targets = {1.0, 1.0, 2.0};
  std::vector<double> gains = {33.5, 33.5, 20.0};

  EvalReport r = make_report(preds, targets, gains);
  CHECK(r.n_test == 3);
  REQUIRE(r.per_distance_mae.size() == 2);
  CHECK(r.per_distance_mae.at(1.0) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(r.per_distance_mae.at(2.0) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(r.averaged_mae == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(r.overall_mae == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(r.rmse == doctest::Approx(std::sqrt(0.14 / 3.0)).epsilon(1e-9));
  REQUIRE(r.per_gain_mae.size() == 2);
  CHECK(r.per_gain_mae.at(33.5) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(r.per_gain_mae.at(20.0) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("averaged_mae ignores per-distance sample counts") {
  // Nine samples at 1 m with error 0.1, one sample at 5 m with error 0.9.
  std::vector<double> preds, targets, gains;
  for (int i = 0; i < 9; ++i) {
    preds.push_back(1.1);
    targets.push_back(1.0);
    gains.push_back(33.5);
  }
  preds.push_back(5.9);
  targets.push_back(5.0);
  gains.push_back(33.5);

  EvalReport r = make_report(preds, targets, gains);
  CHECK(r.averaged_mae == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.overall_mae == doctest::Approx(0.18).epsilon(1e-12));
}

TEST_CASE("duplicating a distance leaves averaged_mae bit-identical") {
  std::vector<double> preds = {1.1, 0.7, 2.2};
  std::vector<double> targets = {1.0, 1.0, 2.0};
  std::vector<double> gains = {33.5, 33.5, 20.0};
  EvalReport before = make_report(preds, targets, gains);

  // Append an exact copy of the single 2 m sample.
  preds.push_back(2.2);
  targets.push_back(2.0);
  gains.push_back(20.0);
  EvalReport after = make_report(preds, targets, gains);

  CHECK(after.averaged_mae == before.averaged_mae);  // exact, not Approx
  CHECK(after.per_distance_mae.at(1.0) == before.per_distance_mae.at(1.0));
  CHECK(after.per_distance_mae.at(2.0) == before.per_distance_mae.at(2.0));
  CHECK(after.overall_mae != before.overall_mae);
  CHECK(after.n_test == 4);
}

TEST_CASE("perfect predictions score zero") {
  std::vector<double> v = {0.5, 1.5, 3.0};
  std::vector<double> g = {0.0, 10.0, 33.5};
  EvalReport r = make_report(v, v, g);
  CHECK(r.averaged_mae == 0.0);
  CHECK(r.overall_mae == 0.0);
  CHECK(r.rmse == 0.0);
}

TEST_CASE("rmse dominates overall mae") {
  Rng rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> preds, targets, gains;
    int n = 2 + static_cast<int>(rng.uniform(0, 30));
    for (int i = 0; i < n; ++i) {
      targets.push_back(rng.uniform(0.5, 6.5));
      preds.push_back(targets.back() + rng.normal(0.7));
      gains.push_back(0.5 * static_cast<int>(rng.uniform(0, 67)));
    }
    EvalReport r = make_report(preds, targets, gains);
    CHECK(r.rmse >= r.overall_mae - 1e-15);
  }
}

TEST_CASE("make_report rejects bad input") {
  std::vector<double> two = {1.0, 2.0}, three = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(make_report(two, three, three), Error);
  std::vector<double> none;
  CHECK_THROWS_AS(make_report(none, none, none), EmptyTestSet);
}

TEST_CASE("evaluate matches manual predictions") {
  FeatureMatrix train = testutil::make_matrix(
      {{0.0}, {1.0}, {2.0}, {3.0}}, {0.5, 1.0, 1.5, 2.0}, {20.0, 20.0, 33.5, 33.5});
  auto model = make_regressor("knn", {{"k", "1"}});
  model->train(train);

  FeatureMatrix test = testutil::make_matrix({{0.2}, {2.9}}, {0.5, 2.0},
                                             {20.0, 33.5});
  EvalReport via_eval = evaluate(*model, test);

  std::vector<double> preds;
  for (std::size_t i = 0; i < test.n_rows; ++i)
    preds.push_back(model->predict(test.row(i)));
  EvalReport manual = make_report(preds, test.targets, test.gains);

  CHECK(via_eval.averaged_mae == manual.averaged_mae);
  CHECK(via_eval.overall_mae == manual.overall_mae);
  CHECK(via_eval.rmse == manual.rmse);

  CHECK_THROWS_AS(evaluate(*model, FeatureMatrix{}), EmptyTestSet);
}

TEST_CASE("split_evaluation is deterministic") {
  Dataset ds = tiny_sim(23);
  FeatureSpec spec = FeatureSpec::preset("fppl_gain");
  EvalReport a = split_evaluation(ds, spec, knn2(), 0.75, 5);
  EvalReport b = split_evaluation(ds, spec, knn2(), 0.75, 5);
  CHECK(a.averaged_mae == b.averaged_mae);
  CHECK(a.overall_mae == b.overall_mae);
  CHECK(a.n_test == b.n_test);
  CHECK(a.n_test > 0);
  // Four distances, each with at least one test row.
  CHECK(a.per_distance_mae.size() == 4);
}

TEST_CASE("transfer_study layout and degenerate case") {
  std::map<std::string, Dataset> sets = {{"alpha", tiny_sim(29)},
                                         {"beta", tiny_sim(31)}};
  FeatureSpec spec = FeatureSpec::preset("fppl_gain");
  TransferStudy study = transfer_study(sets, sets, spec, knn2(), 0.75, 7);

  CHECK(study.envs == std::vector<std::string>{"alpha", "beta"});
  REQUIRE(study.cells.size() == 4);
  for (const auto& a : study.envs)
    for (const auto& b : study.envs)
      CHECK(study.cells.count({a, b}) == 1);

  CHECK(study.cells.at({"alpha", "alpha"}).n_test > 0);
  // Cross cells see every delivered record of the test environment.
  CHECK(study.cells.at({"alpha", "beta"}).n_test >
        study.cells.at({"beta", "beta"}).n_test);

  std::map<std::string, Dataset> same = {{"x", tiny_sim(29)}};
  TransferStudy identical = transfer_study(same, same, spec, knn2(), 0.75, 7);
  CHECK(identical.cells.size() == 1);

  std::map<std::string, Dataset> other = {{"y", tiny_sim(29)}};
  CHECK_THROWS_AS(transfer_study(same, other, spec, knn2(), 0.75, 7), Error);
  CHECK_THROWS_AS(transfer_study({}, {}, spec, knn2(), 0.75, 7), Error);
}

TEST_CASE("cross-environment cells use the full datasets") {
  // Train and test sets differ: the cross cell must evaluate on the test
  // map's records. With identical feature values and shifted targets the
  // error equals the shift exactly.
  std::vector<CirRecord> train_recs, test_recs;
  for (double d : {1.0, 2.0, 3.0}) {
    for (int i = 0; i < 2; ++i) {
      train_recs.push_back(make_record(d, 33.5, -6.0 * d));
      test_recs.push_back(make_record(d + 0.5, 33.5, -6.0 * d));
    }
  }
  std::map<std::string, Dataset> train_sets = {
      {"a", Dataset::validated(train_recs)}, {"b", Dataset::validated(train_recs)}};
  std::map<std::string, Dataset> test_sets = {
      {"a", Dataset::validated(test_recs)}, {"b", Dataset::validated(test_recs)}};

  FeatureSpec spec = FeatureSpec::preset("fppl_only");
  TransferStudy study = transfer_study(train_sets, test_sets, spec,
                                       regressor_factory("knn", {{"k", "1"}}),
                                       0.5, 1);
  CHECK(study.cells.at({"a", "b"}).overall_mae ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("leave-one-distance-out recovers an exact linear law") {
  // fppl is exactly linear in distance, so each fold's OLS fit predicts
  // the held-out distance with no error.
  std::vector<CirRecord> recs;
  for (double d : {1.0, 2.0, 3.0, 4.0, 5.0})
    for (int i = 0; i < 3; ++i)
      recs.push_back(make_record(d, 33.5, -10.0 * d + 2.0));
  Dataset ds = Dataset::validated(recs);

  EvalReport r = loo_distance_cv(ds, FeatureSpec::preset("fppl_only"),
                                 regressor_factory("ols"));
  CHECK(r.per_distance_mae.size() == 5);  // one fold per distance
  CHECK(r.averaged_mae < 1e-9);
  CHECK(r.n_test == 15);
}

TEST_CASE("leave-one-distance-out needs three distances") {
  std::vector<CirRecord> recs = {make_record(1.0, 33.5, -5.0),
                                 make_record(2.0, 33.5, -11.0)};
  CHECK_THROWS_AS(loo_distance_cv(Dataset::validated(recs),
                                  FeatureSpec::preset("fppl_only"), knn2()),
                  TooFewDistances);
}

TEST_CASE("held-out distances really are unseen in each fold") {
  // A 1-NN model that had seen the held-out distance would score zero.
  // Distances are far apart, so every fold must err by a full step.
  std::vector<CirRecord> recs;
  for (double d : {1.0, 2.0, 3.0})
    for (int i = 0; i < 2; ++i) recs.push_back(make_record(d, 33.5, -8.0 * d));
  EvalReport r = loo_distance_cv(Dataset::validated(recs),
                                 FeatureSpec::preset("fppl_only"),
                                 regressor_factory("knn", {{"k", "1"}}));
  CHECK(r.averaged_mae > 0.5);
}

TEST_CASE("report serialization") {
  std::vector<double> preds = {1.1, 0.7, 2.2};
  std::vector<double> targets = {1.0, 1.0, 2.0};
  std::vector<double> gains = {33.5, 33.5, 20.0};
  EvalReport r = make_report(preds, targets, gains);

  SUBCASE("json fields and value fidelity") {
    std::string text = report_to_json(r);
    CHECK(report_to_json(r) == text);  // deterministic
    auto j = nlohmann::json::parse(text);
    CHECK(j.at("averaged_mae").get<double>() == r.averaged_mae);
    CHECK(j.at("overall_mae").get<double>() == r.overall_mae);
    CHECK(j.at("rmse").get<double>() == r.rmse);
    CHECK(j.at("n_test").get<std::size_t>() == 3);
    CHECK(j.at("per_distance_mae").at("1").get<double>() ==
          r.per_distance_mae.at(1.0));
    CHECK(j.at("per_gain_mae").at("33.5").get<double>() ==
          r.per_gain_mae.at(33.5));
  }
  SUBCASE("csv rows follow the distance map") {
    std::string csv = report_to_csv(r);
    CHECK(csv.find("distance_m,mae\n") == 0);
    CHECK(csv.find("\n1,") != std::string::npos);
    CHECK(csv.find("\n2,") != std::string::npos);
  }
}

TEST_CASE("transfer serialization") {
  std::map<std::string, Dataset> sets = {{"alpha", tiny_sim(29)},
                                         {"beta", tiny_sim(31)}};
  FeatureSpec spec = FeatureSpec::preset("fppl_gain");
  TransferStudy study = transfer_study(sets, sets, spec, knn2(), 0.75, 7);

  std::string text = transfer_to_json(study);
  auto j = nlohmann::json::parse(text);
  CHECK(j.at("environments").size() == 2);
  CHECK(j.at("cells").contains("alpha->beta"));
  CHECK(j.at("cells").at("alpha->alpha").contains("averaged_mae"));

  std::string csv = transfer_to_csv(study);
  CHECK(csv.find("train_env,test_env,distance_m,mae\n") == 0);
  // 4 cells x 4 distances + header + trailing newline.
  std::size_t lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 1 + 4 * 4);
}
