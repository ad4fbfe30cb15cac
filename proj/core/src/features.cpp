#include "uwbrss/features.hpp"

#include <algorithm>
#include <cmath>

#include "uwbrss/errors.hpp"

namespace uwbrss {

const std::vector<std::string>& register_names() {
  static const std::vector<std::string> names = {
      "fppl_db",    "rssi_db",  "fp_idx",   "lde_ppampl",
      "lde_ppindx", "fp_ampl1", "fp_ampl2", "fp_ampl3"};
  return names;
}

FeatureSpec FeatureSpec::preset(const std::string& name) {
  FeatureSpec spec;
  if (name == "fppl_only") {
    spec.registers = {"fppl_db"};
  } else if (name == "fppl_gain") {
    spec.registers = {"fppl_db"};
    spec.include_tx_gain = true;
  } else if (name == "cir32_gain") {
    spec.use_cir_magnitudes = true;
    spec.include_tx_gain = true;
    spec.standardize = true;
  } else if (name == "cir32_nogain") {
    spec.use_cir_magnitudes = true;
    spec.standardize = true;
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown feature preset '" + name + "' (available: " +
                      known + ")");
  }
  return spec;
}

std::vector<std::string> FeatureSpec::preset_names() {
  return {"fppl_only", "fppl_gain", "cir32_gain", "cir32_nogain"};
}

namespace {

void check_spec(const FeatureSpec& spec) {
  if (!spec.use_cir_magnitudes && spec.registers.empty() && !spec.include_tx_gain)
    throw EmptySpec();
  const auto& known = register_names();
  for (const auto& reg : spec.registers) {
    if (std::find(known.begin(), known.end(), reg) == known.end())
      throw ColumnMismatch("unknown register feature: " + reg);
  }
}

void append_row(std::vector<double>& values, const CirRecord& rec,
                const FeatureSpec& spec) {
  if (spec.use_cir_magnitudes)
    for (int k = 0; k < kCirLength; ++k) values.push_back(std::abs(rec.cir[k]));
  for (const auto& reg : spec.registers) {
    if (reg == "fppl_db") values.push_back(rec.fppl_db);
    else if (reg == "rssi_db") values.push_back(rec.rssi_db);
    else if (reg == "fp_idx") values.push_back(rec.fp_idx);
    else if (reg == "lde_ppampl") values.push_back(rec.lde_ppampl);
    else if (reg == "lde_ppindx") values.push_back(rec.lde_ppindx);
    else if (reg == "fp_ampl1") values.push_back(rec.fp_ampl1);
    else if (reg == "fp_ampl2") values.push_back(rec.fp_ampl2);
    else values.push_back(rec.fp_ampl3);
  }
  if (spec.include_tx_gain) values.push_back(rec.tx_gain_db);
}

}  // namespace

FeatureMatrix build_matrix(const Dataset& ds, const FeatureSpec& spec) {
  check_spec(spec);

  FeatureMatrix m;
  if (spec.use_cir_magnitudes)
    for (int k = 0; k < kCirLength; ++k)
      m.column_names.push_back("cir_" + std::to_string(k));
  for (const auto& reg : spec.registers) m.column_names.push_back(reg);
  if (spec.include_tx_gain) m.column_names.push_back("tx_gain_db");
  m.n_cols = m.column_names.size();

  for (const auto& rec : ds.records()) {
    if (!rec.delivered) continue;
    append_row(m.values, rec, spec);
    m.targets.push_back(rec.true_distance_m);
    m.gains.push_back(rec.tx_gain_db);
    ++m.n_rows;
  }
  if (m.n_rows == 0)
    throw NoDeliveredRecords("dataset has no delivered records to featurize");
  return m;
}

std::vector<double> feature_row(const CirRecord& rec, const FeatureSpec& spec) {
  check_spec(spec);
  if (!rec.delivered)
    throw NoDeliveredRecords("cannot featurize an undelivered record");
  std::vector<double> row;
  append_row(row, rec, spec);
  return row;
}

Standardizer Standardizer::identity(const FeatureMatrix& m) {
  Standardizer st;
  st.column_names = m.column_names;
  st.mean.assign(m.n_cols, 0.0);
  st.scale.assign(m.n_cols, 1.0);
  return st;
}

Standardizer fit_standardizer(const FeatureMatrix& m,
                              const std::set<std::string>& exclude) {
  if (m.n_rows < 2)
    throw TooFewRows("standardizer needs >= 2 rows, got " +
                     std::to_string(m.n_rows));
  Standardizer st = Standardizer::identity(m);
  for (std::size_t j = 0; j < m.n_cols; ++j) {
    if (exclude.count(m.column_names[j])) continue;
    double sum = 0.0;
    for (std::size_t i = 0; i < m.n_rows; ++i) sum += m.at(i, j);
    double mean = sum / static_cast<double>(m.n_rows);
    double ss = 0.0;
    for (std::size_t i = 0; i < m.n_rows; ++i) {
      double d = m.at(i, j) - mean;
      ss += d * d;
    }
    double var = ss / static_cast<double>(m.n_rows);
    st.mean[j] = mean;
    st.scale[j] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  return st;
}

FeatureMatrix apply_standardizer(const Standardizer& st, FeatureMatrix m) {
  if (st.column_names != m.column_names)
    throw ColumnMismatch("standardizer was fit on different columns");
  for (std::size_t i = 0; i < m.n_rows; ++i) {
    double* row = m.values.data() + i * m.n_cols;
    for (std::size_t j = 0; j < m.n_cols; ++j)
      row[j] = (row[j] - st.mean[j]) / st.scale[j];
  }
  return m;
}

void apply_standardizer_row(const Standardizer& st, std::span<double> row) {
  if (row.size() != st.mean.size())
    throw ColumnMismatch("row width differs from standardizer");
  for (std::size_t j = 0; j < row.size(); ++j)
    row[j] = (row[j] - st.mean[j]) / st.scale[j];
}

Standardizer standardize_train_test(const FeatureSpec& spec, FeatureMatrix& train,
                                    FeatureMatrix& test) {
  Standardizer st = spec.standardize
                        ? fit_standardizer(train, {"tx_gain_db"})
                        : Standardizer::identity(train);
  if (spec.standardize) {
    train = apply_standardizer(st, std::move(train));
    test = apply_standardizer(st, std::move(test));
  }
  return st;
}

}  // namespace uwbrss
