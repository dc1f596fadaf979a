#include "upm/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "upm/error.hpp"
#include "upm/kernels.hpp"

namespace upm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double soft_threshold(double z, double lambda) {
  if (z > lambda) return z - lambda;
  if (z < -lambda) return z + lambda;
  return 0.0;
}

void check_training_data(const Matrix& features, const Vector& target) {
  require(features.rows() == target.size(), ErrorCode::DimensionMismatch,
          "feature rows and target length differ");
  require(target.size() >= 2, ErrorCode::EmptySample, "a learner needs at least two observations");
  require(features.cols() >= 1, ErrorCode::DimensionMismatch, "a learner needs at least one feature");
  require(features.allFinite() && target.allFinite(), ErrorCode::DomainError,
          "training data contain non-finite values");
}

// Standardized copy of the design: centered columns with (1/N) sum z^2 = 1.
// Constant columns keep scale 1 and stay identically zero.
struct Standardized {
  Matrix z;
  Vector center;
  Vector scale;
  Vector variance;  // (1/N) z_j^T z_j, 1 or 0
  Vector target;    // centered
  double target_mean = 0.0;
};

Standardized standardize(const Matrix& x, const Vector& t) {
  Standardized s;
  const auto n = static_cast<double>(x.rows());
  s.center = x.colwise().mean().transpose();
  s.scale.resize(x.cols());
  s.variance.resize(x.cols());
  s.z = x.rowwise() - s.center.transpose();
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double sd = std::sqrt(s.z.col(j).squaredNorm() / n);
    if (sd > 0.0) {
      s.scale[j] = sd;
      s.z.col(j) /= sd;
      s.variance[j] = s.z.col(j).squaredNorm() / n;
    } else {
      s.scale[j] = 1.0;
      s.z.col(j).setZero();
      s.variance[j] = 0.0;
    }
  }
  s.target_mean = t.mean();
  s.target = t.array() - s.target_mean;
  return s;
}

class LassoSolver {
 public:
  LassoSolver(const Matrix& x, const Vector& t, const LinearSpec& options)
      : data_(standardize(x, t)), options_(options), beta_(Vector::Zero(x.cols())), residual_(data_.target) {
    const auto n = static_cast<double>(x.rows());
    gram_ = data_.z.transpose() * data_.z / n;
    correlation_ = data_.z.transpose() * data_.target / n;
  }

  double lambda_max() const { return correlation_.cwiseAbs().maxCoeff(); }

  // Coordinate descent from the current (warm) coefficients, then an exact
  // solve on the active set when it satisfies the optimality conditions.
  int solve(double lambda) {
    const auto n = static_cast<double>(data_.z.rows());
    if (lambda >= lambda_max()) {
      // Every coordinate satisfies |gradient| <= lambda at zero; skip rounding-level entries.
      beta_.setZero();
      residual_ = data_.target;
      return 0;
    }
    int sweeps = 0;
    for (; sweeps < options_.max_sweeps; ++sweeps) {
      double max_change = 0.0;
      for (Eigen::Index j = 0; j < beta_.size(); ++j) {
        const double v = data_.variance[j];
        if (v == 0.0) continue;
        const double old = beta_[j];
        const double rho = data_.z.col(j).dot(residual_) / n + v * old;
        const double updated = soft_threshold(rho, lambda) / v;
        if (updated != old) {
          residual_ -= (updated - old) * data_.z.col(j);
          beta_[j] = updated;
          max_change = std::max(max_change, std::abs(updated - old));
        }
      }
      if (max_change < options_.tolerance) {
        ++sweeps;
        break;
      }
    }
    polish(lambda);
    return sweeps;
  }

  LinearState state(double lambda, int sweeps) const {
    LinearState s;
    s.intercept = data_.target_mean;
    s.coefficients = beta_;
    s.center = data_.center;
    s.scale = data_.scale;
    s.penalty = Penalty::Lasso;
    s.lambda = lambda;
    s.sweeps = sweeps;
    return s;
  }

  double rss() const { return residual_.squaredNorm(); }
  int active() const { return static_cast<int>((beta_.array() != 0.0).count()); }

 private:
  void polish(double lambda) {
    std::vector<Eigen::Index> act;
    for (Eigen::Index j = 0; j < beta_.size(); ++j)
      if (beta_[j] != 0.0) act.push_back(j);
    if (act.empty()) return;
    const auto a = static_cast<Eigen::Index>(act.size());
    Matrix g(a, a);
    Vector rhs(a);
    for (Eigen::Index r = 0; r < a; ++r) {
      rhs[r] = correlation_[act[r]] - lambda * (beta_[act[r]] > 0.0 ? 1.0 : -1.0);
      for (Eigen::Index c = 0; c < a; ++c) g(r, c) = gram_(act[r], act[c]);
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(g);
    if (qr.rank() < a) return;
    const Vector exact = qr.solve(rhs);
    Vector candidate = Vector::Zero(beta_.size());
    for (Eigen::Index r = 0; r < a; ++r) {
      const double old = beta_[act[r]];
      if (exact[r] == 0.0 || (exact[r] > 0.0) != (old > 0.0)) return;
      candidate[act[r]] = exact[r];
    }
    const Vector grad = correlation_ - gram_ * candidate;
    const double slack = 1e-9 * std::max(1.0, lambda);
    for (Eigen::Index j = 0; j < beta_.size(); ++j)
      if (candidate[j] == 0.0 && std::abs(grad[j]) > lambda + slack) return;
    beta_ = candidate;
    residual_ = data_.target - data_.z * beta_;
  }

  Standardized data_;
  LinearSpec options_;
  Matrix gram_;
  Vector correlation_;
  Vector beta_;
  Vector residual_;
};

double bic(double rss, int df, double n) {
  const double floor = std::numeric_limits<double>::min();
  return n * std::log(std::max(rss, floor) / n) + df * std::log(n);
}

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

// Best squared-error split of `rows` over all features and unique-value midpoints.
SplitChoice best_split(const Matrix& x, const Vector& r, const std::vector<Eigen::Index>& rows) {
  SplitChoice best;
  const auto n = static_cast<double>(rows.size());
  double total = 0.0;
  for (auto i : rows) total += r[i];
  std::vector<Eigen::Index> order(rows);
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return x(a, f) < x(b, f); });
    double left = 0.0;
    for (std::size_t p = 0; p + 1 < order.size(); ++p) {
      left += r[order[p]];
      const double lo = x(order[p], f);
      const double hi = x(order[p + 1], f);
      if (!(hi > lo)) continue;
      const double nl = static_cast<double>(p + 1);
      const double nr = n - nl;
      const double right = total - left;
      const double gain = left * left / nl + right * right / nr - total * total / n;
      if (gain > best.gain) {
        double mid = lo + 0.5 * (hi - lo);
        if (!(mid < hi)) mid = lo;
        best = {static_cast<int>(f), mid, gain};
      }
    }
  }
  return best;
}

int grow(std::vector<TreeNode>& nodes, const Matrix& x, const Vector& r, const std::vector<Eigen::Index>& rows,
         int depth_left, double shrinkage) {
  const int id = static_cast<int>(nodes.size());
  nodes.emplace_back();
  double sum = 0.0;
  for (auto i : rows) sum += r[i];
  nodes[id].value = rows.empty() ? 0.0 : shrinkage * sum / static_cast<double>(rows.size());
  if (depth_left == 0 || rows.size() < 2) return id;
  const SplitChoice split = best_split(x, r, rows);
  if (split.feature < 0) return id;
  std::vector<Eigen::Index> left;
  std::vector<Eigen::Index> right;
  for (auto i : rows) (x(i, split.feature) <= split.threshold ? left : right).push_back(i);
  nodes[id].feature = split.feature;
  nodes[id].threshold = split.threshold;
  const int l = grow(nodes, x, r, left, depth_left - 1, shrinkage);
  const int rr = grow(nodes, x, r, right, depth_left - 1, shrinkage);
  nodes[id].left = l;
  nodes[id].right = rr;
  return id;
}

template <class Row>
double tree_value(const std::vector<TreeNode>& nodes, const Row& x) {
  int id = 0;
  while (nodes[id].feature >= 0) id = x[nodes[id].feature] <= nodes[id].threshold ? nodes[id].left : nodes[id].right;
  return nodes[id].value;
}

GbmState fit_gbm(const GbmSpec& spec, const Matrix& x, const Vector& t, std::uint64_t seed) {
  GbmState state;
  const Eigen::Index n = x.rows();
  state.base_score = t.mean();
  state.shrinkage = spec.shrinkage;
  Vector fitted = Vector::Constant(n, state.base_score);
  state.training_loss.push_back((t - fitted).squaredNorm() / static_cast<double>(n));
  std::mt19937_64 rng(seed);
  std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  const auto bag = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(spec.subsample * static_cast<double>(n))));
  for (int b = 0; b < spec.trees; ++b) {
    const Vector residual = t - fitted;
    std::vector<Eigen::Index> rows = all;
    if (bag < rows.size()) {
      // Partial Fisher-Yates draw without replacement.
      for (std::size_t i = 0; i < bag; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, rows.size() - 1);
        std::swap(rows[i], rows[pick(rng)]);
      }
      rows.resize(bag);
      std::sort(rows.begin(), rows.end());
    }
    std::vector<TreeNode> nodes;
    grow(nodes, x, residual, rows, spec.depth, spec.shrinkage);
    for (Eigen::Index i = 0; i < n; ++i) fitted[i] += tree_value(nodes, x.row(i));
    state.trees.push_back(std::move(nodes));
    state.training_loss.push_back((t - fitted).squaredNorm() / static_cast<double>(n));
  }
  return state;
}

}  // namespace

LearnerSpec LearnerSpec::knn(int k) {
  LearnerSpec s;
  s.kind = KnnSpec{k};
  s.validate();
  return s;
}

LearnerSpec LearnerSpec::ols() {
  LearnerSpec s;
  s.kind = LinearSpec{};
  return s;
}

LearnerSpec LearnerSpec::lasso(std::optional<double> lambda) {
  LearnerSpec s;
  LinearSpec l;
  l.penalty = Penalty::Lasso;
  l.lambda = lambda;
  s.kind = l;
  s.validate();
  return s;
}

LearnerSpec LearnerSpec::gbm(int trees, int depth, double shrinkage, double subsample) {
  LearnerSpec s;
  s.kind = GbmSpec{trees, depth, shrinkage, subsample};
  s.validate();
  return s;
}

void LearnerSpec::validate() const {
  std::visit(Overloaded{
                 [](const KnnSpec& k) { require(k.k >= 1, ErrorCode::InvalidArgument, "knn needs k >= 1"); },
                 [](const LinearSpec& l) {
                   if (l.lambda)
                     require(std::isfinite(*l.lambda) && *l.lambda >= 0.0, ErrorCode::InvalidArgument,
                             "lasso lambda must be a finite nonnegative number");
                   require(l.path_length >= 2, ErrorCode::InvalidArgument, "lasso path needs >= 2 points");
                   require(l.path_ratio > 0.0 && l.path_ratio < 1.0, ErrorCode::InvalidArgument,
                           "lasso path ratio must lie in (0,1)");
                   require(l.max_sweeps >= 1 && l.tolerance > 0.0, ErrorCode::InvalidArgument,
                           "lasso convergence settings must be positive");
                 },
                 [](const GbmSpec& g) {
                   require(g.trees >= 0, ErrorCode::InvalidArgument, "gbm trees must be >= 0");
                   require(g.depth == 1 || g.depth == 2, ErrorCode::InvalidArgument, "gbm depth must be 1 or 2");
                   require(g.shrinkage > 0.0 && g.shrinkage <= 1.0, ErrorCode::InvalidArgument,
                           "gbm shrinkage must lie in (0,1]");
                   require(g.subsample > 0.0 && g.subsample <= 1.0, ErrorCode::InvalidArgument,
                           "gbm subsample must lie in (0,1]");
                 }},
             kind);
}

std::string LearnerSpec::name() const {
  return std::visit(Overloaded{[](const KnnSpec&) { return std::string("knn"); },
                               [](const LinearSpec& l) {
                                 return std::string(l.penalty == Penalty::Lasso ? "lasso" : "ols");
                               },
                               [](const GbmSpec&) { return std::string("gbm"); }},
                    kind);
}

Vector LinearState::raw_coefficients() const { return coefficients.cwiseQuotient(scale); }

double LinearState::raw_intercept() const { return intercept - raw_coefficients().dot(center); }

int LinearState::active_count() const { return static_cast<int>((coefficients.array() != 0.0).count()); }

FittedLearner::FittedLearner(State state, std::size_t feature_count, std::vector<std::string> labels)
    : state_(std::move(state)), feature_count_(feature_count), labels_(std::move(labels)) {}

std::string FittedLearner::kind() const {
  return std::visit(Overloaded{[](const KnnState&) { return std::string("knn"); },
                               [](const LinearState& l) {
                                 return std::string(l.penalty == Penalty::Lasso ? "lasso" : "ols");
                               },
                               [](const GbmState&) { return std::string("gbm"); }},
                    state_);
}

double FittedLearner::predict(std::span<const double> x) const {
  require(x.size() == feature_count_, ErrorCode::DimensionMismatch,
          "prediction point has " + std::to_string(x.size()) + " features, model expects " +
              std::to_string(feature_count_));
  return std::visit(
      Overloaded{
          [&](const KnnState& s) {
            Matrix q(1, static_cast<Eigen::Index>(x.size()));
            std::copy(x.begin(), x.end(), q.data());
            return kernels::knn_predict_serial(s, q)[0];
          },
          [&](const LinearState& s) {
            double v = s.intercept;
            for (std::size_t j = 0; j < x.size(); ++j) {
              const auto jj = static_cast<Eigen::Index>(j);
              if (s.coefficients[jj] != 0.0) v += s.coefficients[jj] * (x[j] - s.center[jj]) / s.scale[jj];
            }
            return v;
          },
          [&](const GbmState& s) {
            double v = s.base_score;
            for (const auto& tree : s.trees) v += tree_value(tree, x);
            return v;
          }},
      state_);
}

Vector FittedLearner::predict(const Matrix& x, Execution exec) const {
  require(static_cast<std::size_t>(x.cols()) == feature_count_, ErrorCode::DimensionMismatch,
          "prediction matrix has the wrong number of features");
  if (const auto* knn = std::get_if<KnnState>(&state_))
    return exec == Execution::Parallel ? kernels::knn_predict_parallel(*knn, x)
                                       : kernels::knn_predict_serial(*knn, x);
  Vector out(x.rows());
  for_each_index(static_cast<std::size_t>(x.rows()), exec, [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    const Vector row = x.row(r).transpose();
    out[r] = predict(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())));
  });
  return out;
}

LinearState fit_lasso(const Matrix& features, const Vector& target, double lambda, const LinearSpec& options) {
  check_training_data(features, target);
  require(lambda >= 0.0, ErrorCode::InvalidArgument, "lasso lambda must be >= 0");
  LassoSolver solver(features, target, options);
  const int sweeps = solver.solve(lambda);
  return solver.state(lambda, sweeps);
}

LinearState fit_lasso_bic(const Matrix& features, const Vector& target, const LinearSpec& options) {
  check_training_data(features, target);
  LassoSolver solver(features, target, options);
  const auto n = static_cast<double>(target.size());
  const double top = solver.lambda_max();
  if (top <= 0.0) {
    LinearState s = solver.state(0.0, 0);
    s.path_lambdas = {0.0};
    s.path_bic = {bic(solver.rss(), 0, n)};
    return s;
  }
  std::vector<double> lambdas(static_cast<std::size_t>(options.path_length));
  for (int k = 0; k < options.path_length; ++k)
    lambdas[k] = top * std::pow(options.path_ratio, static_cast<double>(k) / (options.path_length - 1));
  std::vector<double> scores;
  LinearState best;
  double best_score = std::numeric_limits<double>::infinity();
  for (double lambda : lambdas) {
    const int sweeps = solver.solve(lambda);
    const double score = bic(solver.rss(), solver.active(), n);
    scores.push_back(score);
    if (score < best_score) {
      best_score = score;
      best = solver.state(lambda, sweeps);
    }
  }
  best.path_lambdas = lambdas;
  best.path_bic = scores;
  return best;
}

LinearState fit_least_squares(const Matrix& features, const Vector& target) {
  check_training_data(features, target);
  const Standardized s = standardize(features, target);
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(s.z);
  LinearState out;
  out.coefficients = cod.solve(s.target);
  out.singular = cod.rank() < s.z.cols();
  out.intercept = s.target_mean;
  out.center = s.center;
  out.scale = s.scale;
  out.penalty = Penalty::None;
  return out;
}

FittedLearner fit(const LearnerSpec& spec, const Matrix& features, const Vector& target,
                  std::vector<std::string> labels) {
  spec.validate();
  check_training_data(features, target);
  const auto q = static_cast<std::size_t>(features.cols());
  FittedLearner::State state = std::visit(
      Overloaded{[&](const KnnSpec& k) -> FittedLearner::State {
                   KnnState s;
                   s.k = k.k;
                   s.features = features;
                   s.targets = target;
                   return s;
                 },
                 [&](const LinearSpec& l) -> FittedLearner::State {
                   if (l.penalty == Penalty::None) return fit_least_squares(features, target);
                   if (l.lambda) return fit_lasso(features, target, *l.lambda, l);
                   return fit_lasso_bic(features, target, l);
                 },
                 [&](const GbmSpec& g) -> FittedLearner::State { return fit_gbm(g, features, target, spec.seed); }},
      spec.kind);
  return FittedLearner(std::move(state), q, std::move(labels));
}

double predict(const FittedLearner& model, std::span<const double> x) { return model.predict(x); }

BootstrapBand bootstrap_band(const LearnerSpec& spec, const Matrix& features, const Vector& target,
                             const Matrix& grid, int replicates, double level, std::uint64_t seed,
                             Execution exec) {
  require(replicates >= 20, ErrorCode::InvalidArgument, "bootstrap band needs at least 20 replicates");
  require(level > 0.0 && level < 1.0, ErrorCode::InvalidArgument, "band level must lie in (0,1)");
  check_training_data(features, target);
  require(grid.cols() == features.cols(), ErrorCode::DimensionMismatch, "grid and features differ in width");
  const Eigen::Index n = features.rows();
  const Eigen::Index g = grid.rows();
  Matrix draws(g, replicates);
  for_each_index(static_cast<std::size_t>(replicates), exec, [&](std::size_t b) {
    std::mt19937_64 rng(derive_seed(seed, b));
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    Matrix xb(n, features.cols());
    Vector yb(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index r = pick(rng);
      xb.row(i) = features.row(r);
      yb[i] = target[r];
    }
    LearnerSpec local = spec;
    local.seed = derive_seed(spec.seed, b);
    const FittedLearner model = fit(local, xb, yb);
    draws.col(static_cast<Eigen::Index>(b)) = model.predict(grid, Execution::Serial);
  });
  BootstrapBand band;
  for (Eigen::Index i = 0; i < g; ++i) {
    std::vector<double> row(static_cast<std::size_t>(replicates));
    for (int b = 0; b < replicates; ++b) row[b] = draws(i, b);
    band.lower.push_back(empirical_quantile(row, 0.5 * (1.0 - level)));
    band.upper.push_back(empirical_quantile(row, 0.5 * (1.0 + level)));
    band.mean.push_back(mean(row));
  }
  return band;
}

}  // namespace upm
