#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uwbrss/dataset.hpp"
#include "uwbrss/features.hpp"
#include "uwbrss/regressors.hpp"

namespace uwbrss {

// The headline number is averaged_mae: the unweighted mean of the
// per-distance MAEs, so distances with many test rows do not dominate.
// overall_mae and rmse weight every sample equally.
struct EvalReport {
  std::map<double, double> per_distance_mae;
  double averaged_mae = 0.0;
  double overall_mae = 0.0;
  double rmse = 0.0;
  std::map<double, double> per_gain_mae;
  std::size_t n_test = 0;
};

// Report from raw prediction/target pairs; gains tag each sample's
// transmit gain for the per-gain breakdown.
EvalReport make_report(std::span<const double> predictions,
                       std::span<const double> targets,
                       std::span<const double> gains);

// Predicts every row of an (already standardized) test matrix.
EvalReport evaluate(const Regressor& model, const FeatureMatrix& test);

// Filter to delivered, stratified split, fit on train (standardizer
// included), evaluate on test. The standard single-environment protocol.
EvalReport split_evaluation(const Dataset& ds, const FeatureSpec& spec,
                            const RegressorFactory& make, double train_fraction,
                            std::uint64_t split_seed);

// Environment pair -> report. Same-environment cells run split_evaluation;
// cross-environment cells train on the full train_sets entry and test on
// the full test_sets entry.
struct TransferStudy {
  std::vector<std::string> envs;
  std::map<std::pair<std::string, std::string>, EvalReport> cells;
};

TransferStudy transfer_study(const std::map<std::string, Dataset>& train_sets,
                             const std::map<std::string, Dataset>& test_sets,
                             const FeatureSpec& spec,
                             const RegressorFactory& make,
                             double train_fraction, std::uint64_t split_seed);

// Leave-one-distance-out cross-validation: one fold per distance, trained
// on all delivered records of the other distances. Needs >= 3 distances.
EvalReport loo_distance_cv(const Dataset& ds, const FeatureSpec& spec,
                           const RegressorFactory& make);

// Deterministic serializations (shortest round-trip numbers, fixed key order).
std::string report_to_json(const EvalReport& report, int indent = 2);
std::string report_to_csv(const EvalReport& report);
std::string transfer_to_json(const TransferStudy& study, int indent = 2);
std::string transfer_to_csv(const TransferStudy& study);

}  // namespace uwbrss
