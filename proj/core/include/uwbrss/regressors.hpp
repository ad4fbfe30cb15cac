#pragma once

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "uwbrss/features.hpp"

namespace uwbrss {

class Regressor {
 public:
  virtual ~Regressor() = default;

  // Replaces any previous fit.
  virtual void train(const FeatureMatrix& m) = 0;

  // Throws Untrained before train(), DimensionMismatch on wrong width.
  virtual double predict(std::span<const double> features) const = 0;

  virtual std::string name() const = 0;
};

struct KnnConfig {
  int k = 2;
  enum class Weighting { kUniform, kInverseDistance };
  Weighting weighting = Weighting::kInverseDistance;
};

// Plain Euclidean k-nearest-neighbours regression. Ties at the k-th
// neighbour go to the earlier training row. An exact feature match (zero
// distance) returns the mean target over all zero-distance rows.
class KnnRegressor final : public Regressor {
 public:
  explicit KnnRegressor(KnnConfig config = {}) : config_(config) {}
  void train(const FeatureMatrix& m) override;
  double predict(std::span<const double> features) const override;
  std::string name() const override { return "knn"; }

 private:
  KnnConfig config_;
  std::vector<double> rows_;
  std::vector<double> targets_;
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  bool trained_ = false;
};

struct RidgeConfig {
  double lambda = 0.0;  // 0 = ordinary least squares
};

// Linear least squares via centred normal equations and a Cholesky solve.
// The intercept is never penalized. OLS needs rows >= columns + 1.
class LinearRegressor final : public Regressor {
 public:
  explicit LinearRegressor(RidgeConfig config = {}) : config_(config) {}
  void train(const FeatureMatrix& m) override;
  double predict(std::span<const double> features) const override;
  std::string name() const override {
    return config_.lambda == 0.0 ? "ols" : "ridge";
  }

  const std::vector<double>& coefficients() const { return beta_; }
  double intercept() const { return intercept_; }

 private:
  RidgeConfig config_;
  std::vector<double> beta_;
  double intercept_ = 0.0;
  bool trained_ = false;
};

struct TreeConfig {
  int max_depth = -1;  // -1 = unlimited
  int min_samples_leaf = 1;
};

// CART regression tree: axis-aligned binary splits minimizing the summed
// squared error of the children; leaves predict the mean target. Equal
// scores resolve to the lower column index, then the lower threshold.
class TreeRegressor final : public Regressor {
 public:
  explicit TreeRegressor(TreeConfig config = {}) : config_(config) {}
  void train(const FeatureMatrix& m) override;
  double predict(std::span<const double> features) const override;
  std::string name() const override { return "tree"; }

 private:
  struct Node {
    int column = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
  };
  int build(const FeatureMatrix& m, std::vector<std::size_t>& rows, int depth);

  TreeConfig config_;
  std::vector<Node> nodes_;
  std::size_t n_cols_ = 0;
  bool trained_ = false;
};

using RegressorParams = std::map<std::string, std::string>;
using RegressorFactory = std::function<std::unique_ptr<Regressor>()>;

// Names: knn, ols, ridge, tree. Unknown names raise UnknownRegressor
// listing what is registered.
std::vector<std::string> registered_regressors();
std::unique_ptr<Regressor> make_regressor(const std::string& name,
                                          const RegressorParams& params = {});
RegressorFactory regressor_factory(const std::string& name,
                                   const RegressorParams& params = {});

}  // namespace uwbrss
