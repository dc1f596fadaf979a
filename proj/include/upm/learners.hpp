#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "upm/numeric.hpp"
#include "upm/parallel.hpp"

namespace upm {

struct KnnSpec {
  int k = 15;
};

enum class Penalty { None, Lasso };

struct LinearSpec {
  Penalty penalty = Penalty::None;
  // Fixed lasso penalty; when empty the penalty is chosen by BIC over a path.
  std::optional<double> lambda;
  int path_length = 100;
  double path_ratio = 1e-4;
  int max_sweeps = 10000;
  double tolerance = 1e-7;
};

struct GbmSpec {
  int trees = 200;
  int depth = 2;
  double shrinkage = 0.1;
  double subsample = 1.0;
};

struct LearnerSpec {
  std::variant<KnnSpec, LinearSpec, GbmSpec> kind = KnnSpec{};
  std::uint64_t seed = 0;

  static LearnerSpec knn(int k = 15);
  static LearnerSpec ols();
  static LearnerSpec lasso(std::optional<double> lambda = std::nullopt);
  static LearnerSpec gbm(int trees = 200, int depth = 2, double shrinkage = 0.1, double subsample = 1.0);

  void validate() const;
  std::string name() const;
};

struct KnnState {
  int k = 15;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> features;
  Vector targets;
};

struct LinearState {
  double intercept = 0.0;
  Vector coefficients;  // on the standardized working scale
  Vector center;
  Vector scale;
  Penalty penalty = Penalty::None;
  double lambda = 0.0;
  bool singular = false;  // least squares fell back to the minimum-norm solution
  int sweeps = 0;
  std::vector<double> path_lambdas;
  std::vector<double> path_bic;

  Vector raw_coefficients() const;
  double raw_intercept() const;
  int active_count() const;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct GbmState {
  double base_score = 0.0;
  double shrinkage = 0.1;
  std::vector<std::vector<TreeNode>> trees;
  std::vector<double> training_loss;  // mean squared error after each round, starting at round 0
};

class FittedLearner {
 public:
  using State = std::variant<KnnState, LinearState, GbmState>;

  FittedLearner() = default;
  FittedLearner(State state, std::size_t feature_count, std::vector<std::string> labels = {});

  const State& state() const noexcept { return state_; }
  std::size_t feature_count() const noexcept { return feature_count_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::string kind() const;

  double predict(std::span<const double> x) const;
  Vector predict(const Matrix& x, Execution exec = Execution::Parallel) const;

 private:
  State state_;
  std::size_t feature_count_ = 0;
  std::vector<std::string> labels_;
};

FittedLearner fit(const LearnerSpec& spec, const Matrix& features, const Vector& target,
                  std::vector<std::string> labels = {});
double predict(const FittedLearner& model, std::span<const double> x);

// Coordinate-descent lasso on standardized columns, minimizing
//   (1/2N) ||t - b0 - F b||^2 + lambda ||b||_1.
LinearState fit_lasso(const Matrix& features, const Vector& target, double lambda,
                      const LinearSpec& options = {});
LinearState fit_lasso_bic(const Matrix& features, const Vector& target, const LinearSpec& options = {});
LinearState fit_least_squares(const Matrix& features, const Vector& target);

struct BootstrapBand {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> mean;
};

// Pointwise percentile band of predictions over `replicates` nonparametric
// bootstrap refits; replicate b draws with seed derive_seed(seed, b).
BootstrapBand bootstrap_band(const LearnerSpec& spec, const Matrix& features, const Vector& target,
                             const Matrix& grid, int replicates, double level, std::uint64_t seed,
                             Execution exec = Execution::Parallel);

}  // namespace upm
