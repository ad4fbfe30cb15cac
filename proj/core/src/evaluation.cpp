#include "uwbrss/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "uwbrss/errors.hpp"

namespace uwbrss {

EvalReport make_report(std::span<const double> predictions,
                       std::span<const double> targets,
                       std::span<const double> gains) {
  if (predictions.size() != targets.size() || targets.size() != gains.size())
    throw Error("predictions, targets and gains must have equal length");
  if (predictions.empty()) throw EmptyTestSet();

  EvalReport report;
  report.n_test = predictions.size();

  std::map<std::int64_t, std::pair<double, std::size_t>> by_distance;
  std::map<std::int64_t, std::pair<double, std::size_t>> by_gain;
  double abs_sum = 0.0, sq_sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    double err = predictions[i] - targets[i];
    double abs_err = std::abs(err);
    abs_sum += abs_err;
    sq_sum += err * err;
    auto& d = by_distance[distance_key_mm(targets[i])];
    d.first += abs_err;
    d.second += 1;
    auto& g = by_gain[gain_key(gains[i])];
    g.first += abs_err;
    g.second += 1;
  }

  double mae_sum = 0.0;
  for (const auto& [key, acc] : by_distance) {
    double mae = acc.first / static_cast<double>(acc.second);
    report.per_distance_mae[static_cast<double>(key) / 1000.0] = mae;
    mae_sum += mae;
  }
  report.averaged_mae = mae_sum / static_cast<double>(by_distance.size());
  report.overall_mae = abs_sum / static_cast<double>(report.n_test);
  report.rmse = std::sqrt(sq_sum / static_cast<double>(report.n_test));
  for (const auto& [key, acc] : by_gain)
    report.per_gain_mae[static_cast<double>(key) * kGainStepDb] =
        acc.first / static_cast<double>(acc.second);
  return report;
}

EvalReport evaluate(const Regressor& model, const FeatureMatrix& test) {
  if (test.n_rows == 0) throw EmptyTestSet();
  std::vector<double> predictions(test.n_rows);
  for (std::size_t i = 0; i < test.n_rows; ++i)
    predictions[i] = model.predict(test.row(i));
  return make_report(predictions, test.targets, test.gains);
}

namespace {

Dataset delivered_only(const Dataset& ds) {
  return filter(ds, [](const CirRecord& rec) { return rec.delivered; });
}

EvalReport fit_and_evaluate(const Dataset& train, const Dataset& test,
                            const FeatureSpec& spec,
                            const RegressorFactory& make) {
  FeatureMatrix train_m = build_matrix(train, spec);
  FeatureMatrix test_m = build_matrix(test, spec);
  standardize_train_test(spec, train_m, test_m);
  auto model = make();
  model->train(train_m);
  return evaluate(*model, test_m);
}

}  // namespace

EvalReport split_evaluation(const Dataset& ds, const FeatureSpec& spec,
                            const RegressorFactory& make, double train_fraction,
                            std::uint64_t split_seed) {
  auto [train, test] =
      split_train_test(delivered_only(ds), train_fraction, split_seed);
  return fit_and_evaluate(train, test, spec, make);
}

TransferStudy transfer_study(const std::map<std::string, Dataset>& train_sets,
                             const std::map<std::string, Dataset>& test_sets,
                             const FeatureSpec& spec,
                             const RegressorFactory& make,
                             double train_fraction, std::uint64_t split_seed) {
  if (train_sets.empty()) throw Error("transfer study needs >= 1 environment");
  for (const auto& [env, ds] : train_sets)
    if (!test_sets.count(env))
      throw Error("environment " + env + " missing from test_sets");
  if (test_sets.size() != train_sets.size())
    throw Error("train_sets and test_sets list different environments");

  TransferStudy study;
  for (const auto& [env, ds] : train_sets) study.envs.push_back(env);
  for (const auto& train_env : study.envs) {
    for (const auto& test_env : study.envs) {
      EvalReport report;
      if (train_env == test_env) {
        report = split_evaluation(train_sets.at(train_env), spec, make,
                                  train_fraction, split_seed);
      } else {
        report = fit_and_evaluate(delivered_only(train_sets.at(train_env)),
                                  delivered_only(test_sets.at(test_env)), spec,
                                  make);
      }
      study.cells[{train_env, test_env}] = std::move(report);
    }
  }
  return study;
}

EvalReport loo_distance_cv(const Dataset& ds, const FeatureSpec& spec,
                           const RegressorFactory& make) {
  Dataset delivered = delivered_only(ds);
  std::vector<double> distances = delivered.distances();
  if (distances.size() < 3)
    throw TooFewDistances("leave-one-distance-out needs >= 3 distances, got " +
                          std::to_string(distances.size()));

  std::vector<double> predictions, targets, gains;
  for (double held_out : distances) {
    std::int64_t key = distance_key_mm(held_out);
    Dataset train = filter(delivered, [&](const CirRecord& rec) {
      return distance_key_mm(rec.true_distance_m) != key;
    });
    Dataset test = filter(delivered, [&](const CirRecord& rec) {
      return distance_key_mm(rec.true_distance_m) == key;
    });
    FeatureMatrix train_m = build_matrix(train, spec);
    FeatureMatrix test_m = build_matrix(test, spec);
    standardize_train_test(spec, train_m, test_m);
    auto model = make();
    model->train(train_m);
    for (std::size_t i = 0; i < test_m.n_rows; ++i) {
      predictions.push_back(model->predict(test_m.row(i)));
      targets.push_back(test_m.targets[i]);
      gains.push_back(test_m.gains[i]);
    }
  }
  return make_report(predictions, targets, gains);
}

namespace {

using nlohmann::ordered_json;

ordered_json map_to_json(const std::map<double, double>& m) {
  ordered_json j = ordered_json::object();
  for (const auto& [key, value] : m) j[format_double(key)] = value;
  return j;
}

ordered_json report_json(const EvalReport& report) {
  ordered_json j;
  j["averaged_mae"] = report.averaged_mae;
  j["overall_mae"] = report.overall_mae;
  j["rmse"] = report.rmse;
  j["n_test"] = report.n_test;
  j["per_distance_mae"] = map_to_json(report.per_distance_mae);
  j["per_gain_mae"] = map_to_json(report.per_gain_mae);
  return j;
}

}  // namespace

std::string report_to_json(const EvalReport& report, int indent) {
  return report_json(report).dump(indent) + "\n";
}

std::string report_to_csv(const EvalReport& report) {
  std::string out = "distance_m,mae\n";
  for (const auto& [distance, mae] : report.per_distance_mae)
    out += format_double(distance) + "," + format_double(mae) + "\n";
  return out;
}

std::string transfer_to_json(const TransferStudy& study, int indent) {
  ordered_json j;
  j["environments"] = study.envs;
  ordered_json cells = ordered_json::object();
  for (const auto& [key, report] : study.cells)
    cells[key.first + "->" + key.second] = report_json(report);
  j["cells"] = cells;
  return j.dump(indent) + "\n";
}

std::string transfer_to_csv(const TransferStudy& study) {
  std::string out = "train_env,test_env,distance_m,mae\n";
  for (const auto& [key, report] : study.cells)
    for (const auto& [distance, mae] : report.per_distance_mae)
      out += key.first + "," + key.second + "," + format_double(distance) + "," +
             format_double(mae) + "\n";
  return out;
}

}  // namespace uwbrss
