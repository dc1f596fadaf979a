#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "upm/kernels.hpp"

using namespace upm;

namespace {

Matrix random_matrix(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  Matrix m(n, p);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = d(rng);
  return m;
}

KnnState knn_state(const Matrix& x, const Vector& t, int k) {
  KnnState s;
  s.k = k;
  s.features = x;
  s.targets = t;
  return s;
}

}  // namespace

TEST(KernelsTest, KnnSerialMatchesParallel) {
  for (int k : {1, 7, 15, 300}) {
    const KnnState s = knn_state(random_matrix(300, 4, 1), random_matrix(300, 1, 2).col(0), k);
    const Matrix q = random_matrix(64, 4, 3);
    const Vector a = kernels::knn_predict_serial(s, q);
    const Vector b = kernels::knn_predict_parallel(s, q);
    for (Eigen::Index i = 0; i < q.rows(); ++i) EXPECT_EQ(a[i], b[i]) << k;
  }
}

TEST(KernelsTest, KnnTiedDistances) {
  // Integer grid features give many equal distances.
  Matrix x(100, 2);
  for (int i = 0; i < 100; ++i) {
    x(i, 0) = i % 5;
    x(i, 1) = (i / 5) % 4;
  }
  const KnnState s = knn_state(x, random_matrix(100, 1, 4).col(0), 9);
  Matrix q(3, 2);
  q << 2, 1, 0, 0, 4.5, 3;
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 100; ++i) rows.push_back({x(i, 0), x(i, 1)});
  const auto t = to_std(s.targets);
  const Vector b = kernels::knn_predict_parallel(s, q);
  const Vector a = kernels::knn_predict_serial(s, q);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(a[i], b[i]);
    EXPECT_NEAR(b[i], oracle::knn_mean(rows, t, {q(i, 0), q(i, 1)}, 9), 1e-12);
  }
}

TEST(KernelsTest, GramSerialMatchesParallel) {
  const Matrix t = random_matrix(500, 9, 5);
  const Matrix a = kernels::gram_serial(t);
  const Matrix b = kernels::gram_parallel(t);
  EXPECT_TRUE(a == b);
  EXPECT_LT((a - t.transpose() * t / 500.0).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_TRUE(a.isApprox(a.transpose()));
}

TEST(KernelsTest, ColumnMeansSerialMatchesParallel) {
  const Matrix t = random_matrix(777, 6, 6);
  const Vector a = kernels::column_means_serial(t);
  const Vector b = kernels::column_means_parallel(t);
  EXPECT_TRUE(a == b);
  EXPECT_LT((a - t.colwise().mean().transpose()).cwiseAbs().maxCoeff(), 1e-14);
}
