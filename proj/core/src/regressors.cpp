#include "uwbrss/regressors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uwbrss/errors.hpp"

namespace uwbrss {

// ---- KNN ----

void KnnRegressor::train(const FeatureMatrix& m) {
  if (m.n_rows == 0) throw EmptyMatrix();
  if (config_.k < 1) throw Error("k must be >= 1");
  if (static_cast<std::size_t>(config_.k) > m.n_rows)
    throw KTooLarge(config_.k, m.n_rows);
  rows_ = m.values;
  targets_ = m.targets;
  n_rows_ = m.n_rows;
  n_cols_ = m.n_cols;
  trained_ = true;
}

double KnnRegressor::predict(std::span<const double> features) const {
  if (!trained_) throw Untrained();
  if (features.size() != n_cols_) throw DimensionMismatch(n_cols_, features.size());

  std::vector<std::pair<double, std::size_t>> dist(n_rows_);
  for (std::size_t i = 0; i < n_rows_; ++i) {
    const double* row = rows_.data() + i * n_cols_;
    double d2 = 0.0;
    for (std::size_t j = 0; j < n_cols_; ++j) {
      double diff = features[j] - row[j];
      d2 += diff * diff;
    }
    dist[i] = {d2, i};
  }
  // stable on ties: earlier training rows first
  std::stable_sort(dist.begin(), dist.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  if (dist.front().first == 0.0) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& [d2, idx] : dist) {
      if (d2 != 0.0) break;
      sum += targets_[idx];
      ++n;
    }
    return sum / static_cast<double>(n);
  }

  auto k = static_cast<std::size_t>(config_.k);
  if (config_.weighting == KnnConfig::Weighting::kUniform) {
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += targets_[dist[i].second];
    return sum / static_cast<double>(k);
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double w = 1.0 / std::sqrt(dist[i].first);
    num += w * targets_[dist[i].second];
    den += w;
  }
  return num / den;
}

// ---- linear ----

namespace {

// Solves G x = b for symmetric positive definite G, in place.
// Returns false when a pivot collapses.
bool cholesky_solve(std::vector<double>& g, std::vector<double>& b, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double diag = g[j * n + j];
    for (std::size_t k = 0; k < j; ++k) diag -= g[j * n + k] * g[j * n + k];
    if (!(diag > 1e-12)) return false;
    diag = std::sqrt(diag);
    g[j * n + j] = diag;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = g[i * n + j];
      for (std::size_t k = 0; k < j; ++k) v -= g[i * n + k] * g[j * n + k];
      g[i * n + j] = v / diag;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double v = b[i];
    for (std::size_t k = 0; k < i; ++k) v -= g[i * n + k] * b[k];
    b[i] = v / g[i * n + i];
  }
  for (std::size_t ii = n; ii > 0; --ii) {
    std::size_t i = ii - 1;
    double v = b[i];
    for (std::size_t k = i + 1; k < n; ++k) v -= g[k * n + i] * b[k];
    b[i] = v / g[i * n + i];
  }
  return true;
}

}  // namespace

void LinearRegressor::train(const FeatureMatrix& m) {
  if (m.n_rows == 0) throw EmptyMatrix();
  if (config_.lambda < 0.0) throw Error("lambda must be >= 0");
  if (config_.lambda == 0.0 && m.n_rows < m.n_cols + 1)
    throw SingularDesign("OLS needs rows >= columns + 1 (" +
                         std::to_string(m.n_rows) + " rows, " +
                         std::to_string(m.n_cols) +
                         " columns); use ridge with lambda > 0");

  std::size_t n = m.n_rows, p = m.n_cols;
  std::vector<double> col_mean(p, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) col_mean[j] += m.at(i, j);
  for (auto& v : col_mean) v /= static_cast<double>(n);
  double y_mean =
      std::accumulate(m.targets.begin(), m.targets.end(), 0.0) /
      static_cast<double>(n);

  // Gram matrix and projections of the centred design.
  std::vector<double> g(p * p, 0.0), b(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = m.values.data() + i * p;
    double yc = m.targets[i] - y_mean;
    for (std::size_t j = 0; j < p; ++j) {
      double xj = row[j] - col_mean[j];
      b[j] += xj * yc;
      for (std::size_t k = j; k < p; ++k)
        g[j * p + k] += xj * (row[k] - col_mean[k]);
    }
  }
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = 0; k < j; ++k) g[j * p + k] = g[k * p + j];
  for (std::size_t j = 0; j < p; ++j) g[j * p + j] += config_.lambda;

  std::vector<double> beta = b;
  if (!cholesky_solve(g, beta, p))
    throw SingularDesign(
        "design matrix is singular; drop collinear columns or use ridge "
        "with lambda > 0");

  beta_ = std::move(beta);
  intercept_ = y_mean;
  for (std::size_t j = 0; j < p; ++j) intercept_ -= beta_[j] * col_mean[j];
  trained_ = true;
}

double LinearRegressor::predict(std::span<const double> features) const {
  if (!trained_) throw Untrained();
  if (features.size() != beta_.size())
    throw DimensionMismatch(beta_.size(), features.size());
  double y = intercept_;
  for (std::size_t j = 0; j < beta_.size(); ++j) y += beta_[j] * features[j];
  return y;
}

// ---- tree ----

namespace {

struct SplitScan {
  double best_score;
  int best_col = -1;
  double best_threshold = 0.0;
};

}  // namespace

int TreeRegressor::build(const FeatureMatrix& m, std::vector<std::size_t>& rows,
                         int depth) {
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t r : rows) {
    sum += m.targets[r];
    sumsq += m.targets[r] * m.targets[r];
  }
  auto n = static_cast<double>(rows.size());
  double node_sse = sumsq - sum * sum / n;

  auto make_leaf = [&]() {
    nodes_.push_back({-1, 0.0, -1, -1, sum / n});
    return static_cast<int>(nodes_.size() - 1);
  };
  auto min_leaf = static_cast<std::size_t>(config_.min_samples_leaf);
  if (rows.size() < 2 * min_leaf || node_sse <= 0.0 ||
      (config_.max_depth >= 0 && depth >= config_.max_depth))
    return make_leaf();

  SplitScan scan{node_sse};
  std::vector<std::pair<double, std::size_t>> order(rows.size());
  for (std::size_t j = 0; j < m.n_cols; ++j) {
    for (std::size_t i = 0; i < rows.size(); ++i)
      order[i] = {m.at(rows[i], j), rows[i]};
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    double left_sum = 0.0, left_sumsq = 0.0;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      double y = m.targets[order[i].second];
      left_sum += y;
      left_sumsq += y * y;
      if (order[i].first == order[i + 1].first) continue;
      std::size_t nl = i + 1, nr = order.size() - nl;
      if (nl < min_leaf || nr < min_leaf) continue;
      double threshold = order[i].first + (order[i + 1].first - order[i].first) / 2.0;
      if (!(threshold > order[i].first)) threshold = order[i + 1].first;
      double right_sum = sum - left_sum, right_sumsq = sumsq - left_sumsq;
      double score = (left_sumsq - left_sum * left_sum / static_cast<double>(nl)) +
                     (right_sumsq - right_sum * right_sum / static_cast<double>(nr));
      // strict improvement keeps the lowest (column, threshold) on ties
      if (score < scan.best_score) {
        scan.best_score = score;
        scan.best_col = static_cast<int>(j);
        scan.best_threshold = threshold;
      }
    }
  }
  if (scan.best_col < 0) return make_leaf();

  std::vector<std::size_t> left, right;
  for (std::size_t r : rows)
    (m.at(r, static_cast<std::size_t>(scan.best_col)) < scan.best_threshold
         ? left
         : right)
        .push_back(r);
  rows.clear();
  rows.shrink_to_fit();

  int node = static_cast<int>(nodes_.size());
  nodes_.push_back({scan.best_col, scan.best_threshold, -1, -1, 0.0});
  nodes_[node].left = build(m, left, depth + 1);
  nodes_[node].right = build(m, right, depth + 1);
  return node;
}

void TreeRegressor::train(const FeatureMatrix& m) {
  if (m.n_rows == 0) throw EmptyMatrix();
  if (config_.min_samples_leaf < 1) throw Error("min_samples_leaf must be >= 1");
  nodes_.clear();
  n_cols_ = m.n_cols;
  std::vector<std::size_t> rows(m.n_rows);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  build(m, rows, 0);
  trained_ = true;
}

double TreeRegressor::predict(std::span<const double> features) const {
  if (!trained_) throw Untrained();
  if (features.size() != n_cols_) throw DimensionMismatch(n_cols_, features.size());
  int node = 0;
  while (nodes_[node].column >= 0) {
    node = features[static_cast<std::size_t>(nodes_[node].column)] <
                   nodes_[node].threshold
               ? nodes_[node].left
               : nodes_[node].right;
  }
  return nodes_[node].value;
}

// ---- registry ----

namespace {

double param_double(const RegressorParams& params, const std::string& key,
                    double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (...) {
    throw ConfigError("regressor parameter " + key + ": bad value '" +
                      it->second + "'");
  }
}

int param_int(const RegressorParams& params, const std::string& key,
              int fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  try {
    return std::stoi(it->second);
  } catch (...) {
    throw ConfigError("regressor parameter " + key + ": bad value '" +
                      it->second + "'");
  }
}

}  // namespace

std::vector<std::string> registered_regressors() {
  return {"knn", "ols", "ridge", "tree"};
}

std::unique_ptr<Regressor> make_regressor(const std::string& name,
                                          const RegressorParams& params) {
  if (name == "knn") {
    KnnConfig config;
    config.k = param_int(params, "k", 2);
    auto it = params.find("weighting");
    if (it != params.end()) {
      if (it->second == "uniform")
        config.weighting = KnnConfig::Weighting::kUniform;
      else if (it->second == "inverse_distance")
        config.weighting = KnnConfig::Weighting::kInverseDistance;
      else
        throw ConfigError("weighting must be uniform or inverse_distance");
    }
    return std::make_unique<KnnRegressor>(config);
  }
  if (name == "ols") return std::make_unique<LinearRegressor>(RidgeConfig{0.0});
  if (name == "ridge") {
    RidgeConfig config{param_double(params, "lambda", 1.0)};
    if (config.lambda <= 0.0)
      throw ConfigError("ridge needs lambda > 0; use ols for lambda = 0");
    return std::make_unique<LinearRegressor>(config);
  }
  if (name == "tree") {
    TreeConfig config;
    config.max_depth = param_int(params, "max_depth", -1);
    config.min_samples_leaf = param_int(params, "min_samples_leaf", 1);
    return std::make_unique<TreeRegressor>(config);
  }
  std::string known;
  for (const auto& n : registered_regressors())
    known += (known.empty() ? "" : ", ") + n;
  throw UnknownRegressor("unknown regressor '" + name + "' (available: " +
                         known + ")");
}

RegressorFactory regressor_factory(const std::string& name,
                                   const RegressorParams& params) {
  make_regressor(name, params);  // validate eagerly
  return [name, params]() { return make_regressor(name, params); };
}

}  // namespace uwbrss
