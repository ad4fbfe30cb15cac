#pragma once

#include <set>
#include <span>
#include <string>
#include <vector>

#include "uwbrss/dataset.hpp"

namespace uwbrss {

// Register column names, in canonical order.
const std::vector<std::string>& register_names();

// Which columns to assemble, in fixed order: 32 CIR magnitudes, then the
// selected registers, then the transmit gain.
struct FeatureSpec {
  bool use_cir_magnitudes = false;
  std::vector<std::string> registers;
  bool include_tx_gain = false;
  bool standardize = false;

  // fppl_only, fppl_gain, cir32_gain, cir32_nogain
  static FeatureSpec preset(const std::string& name);
  static std::vector<std::string> preset_names();
};

// Dense row-major design matrix over the delivered records of a dataset.
// targets carries the ground-truth distance and gains the transmit gain
// per row (whether or not gain is a feature), for per-gain reporting.
struct FeatureMatrix {
  std::vector<std::string> column_names;
  std::vector<double> values;  // n_rows * n_cols, row-major
  std::vector<double> targets;
  std::vector<double> gains;
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;

  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * n_cols, n_cols};
  }
  double at(std::size_t i, std::size_t j) const { return values[i * n_cols + j]; }
};

FeatureMatrix build_matrix(const Dataset& ds, const FeatureSpec& spec);

// Feature row of one delivered record, in the same column order.
std::vector<double> feature_row(const CirRecord& rec, const FeatureSpec& spec);

// Per-column affine transform to zero mean, unit variance (population
// std; constant columns keep scale 1).
struct Standardizer {
  std::vector<std::string> column_names;
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer identity(const FeatureMatrix& m);
};

// Columns in `exclude` keep mean 0 / scale 1. Needs >= 2 rows.
Standardizer fit_standardizer(const FeatureMatrix& m,
                              const std::set<std::string>& exclude = {});

// Throws ColumnMismatch if the matrix columns differ from the fit.
FeatureMatrix apply_standardizer(const Standardizer& st, FeatureMatrix m);
void apply_standardizer_row(const Standardizer& st, std::span<double> row);

// spec.standardize semantics: fit on train excluding tx_gain_db, apply to
// both; identity when the spec says not to standardize.
Standardizer standardize_train_test(const FeatureSpec& spec, FeatureMatrix& train,
                                    FeatureMatrix& test);

}  // namespace uwbrss
