#include "upm/kernels.hpp"

#include <algorithm>
#include <numeric>
#include <utility>
#include <vector>

#include "upm/error.hpp"
#include "upm/parallel.hpp"

namespace upm::kernels {

namespace {

using Neighbor = std::pair<double, Eigen::Index>;

double squared_distance(const KnnState& state, Eigen::Index row, const Matrix& queries, Eigen::Index q) {
  double d = 0.0;
  for (Eigen::Index c = 0; c < state.features.cols(); ++c) {
    const double diff = state.features(row, c) - queries(q, c);
    d += diff * diff;
  }
  return d;
}

// Mean of the selected targets, summed in row order so both paths agree bitwise.
double neighbor_mean(const KnnState& state, std::vector<Neighbor>& chosen) {
  std::sort(chosen.begin(), chosen.end(),
            [](const Neighbor& a, const Neighbor& b) { return a.second < b.second; });
  double s = 0.0;
  for (const auto& nb : chosen) s += state.targets[nb.second];
  return s / static_cast<double>(chosen.size());
}

void check(const KnnState& state, const Matrix& queries) {
  require(queries.cols() == state.features.cols(), ErrorCode::DimensionMismatch,
          "knn query has the wrong number of features");
}

}  // namespace

Vector knn_predict_serial(const KnnState& state, const Matrix& queries) {
  check(state, queries);
  const Eigen::Index n = state.features.rows();
  const auto k = static_cast<std::size_t>(std::min<Eigen::Index>(state.k, n));
  Vector out(queries.rows());
  std::vector<Neighbor> all(static_cast<std::size_t>(n));
  for (Eigen::Index q = 0; q < queries.rows(); ++q) {
    for (Eigen::Index i = 0; i < n; ++i) all[i] = {squared_distance(state, i, queries, q), i};
    std::sort(all.begin(), all.end());
    std::vector<Neighbor> chosen(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k));
    out[q] = neighbor_mean(state, chosen);
  }
  return out;
}

Vector knn_predict_parallel(const KnnState& state, const Matrix& queries) {
  check(state, queries);
  const Eigen::Index n = state.features.rows();
  const auto k = static_cast<std::size_t>(std::min<Eigen::Index>(state.k, n));
  Vector out(queries.rows());
  for_each_index(static_cast<std::size_t>(queries.rows()), Execution::Parallel, [&](std::size_t qi) {
    const auto q = static_cast<Eigen::Index>(qi);
    std::vector<Neighbor> all(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) all[i] = {squared_distance(state, i, queries, q), i};
    std::nth_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k - 1), all.end());
    std::vector<Neighbor> chosen(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k));
    out[q] = neighbor_mean(state, chosen);
  });
  return out;
}

Matrix gram_serial(const Matrix& t) {
  const Eigen::Index n = t.rows();
  const Eigen::Index m = t.cols();
  Matrix g(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      double s = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) s += t(i, a) * t(i, b);
      g(a, b) = s / static_cast<double>(n);
    }
  }
  return g;
}

Matrix gram_parallel(const Matrix& t) {
  const Eigen::Index n = t.rows();
  const Eigen::Index m = t.cols();
  Matrix g(m, m);
  for_each_index(static_cast<std::size_t>(m), Execution::Parallel, [&](std::size_t ai) {
    const auto a = static_cast<Eigen::Index>(ai);
    for (Eigen::Index b = 0; b < m; ++b) {
      double s = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) s += t(i, a) * t(i, b);
      g(a, b) = s / static_cast<double>(n);
    }
  });
  return g;
}

Vector column_means_serial(const Matrix& t) {
  Vector out(t.cols());
  for (Eigen::Index c = 0; c < t.cols(); ++c) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < t.rows(); ++i) s += t(i, c);
    out[c] = s / static_cast<double>(t.rows());
  }
  return out;
}

Vector column_means_parallel(const Matrix& t) {
  Vector out(t.cols());
  for_each_index(static_cast<std::size_t>(t.cols()), Execution::Parallel, [&](std::size_t ci) {
    const auto c = static_cast<Eigen::Index>(ci);
    double s = 0.0;
    for (Eigen::Index i = 0; i < t.rows(); ++i) s += t(i, c);
    out[c] = s / static_cast<double>(t.rows());
  });
  return out;
}

}  // namespace upm::kernels
