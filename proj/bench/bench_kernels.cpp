// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS to vary threads.

#include <benchmark/benchmark.h>

#include <random>

#include "upm/kernels.hpp"

using namespace upm;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> e;
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = e(rng);
  return m;
}

KnnState knn_state(Eigen::Index n, Eigen::Index p) {
  KnnState s;
  s.k = 15;
  s.features = random_matrix(n, p, 1);
  s.targets = random_matrix(n, 1, 2).col(0);
  return s;
}

template <Vector (*Kernel)(const KnnState&, const Matrix&)>
void BM_Knn(benchmark::State& st) {
  const KnnState s = knn_state(st.range(0), 4);
  const Matrix q = random_matrix(256, 4, 3);
  for (auto _ : st) benchmark::DoNotOptimize(Kernel(s, q));
  st.SetItemsProcessed(st.iterations() * q.rows());
}

template <Matrix (*Kernel)(const Matrix&)>
void BM_Gram(benchmark::State& st) {
  const Matrix t = random_matrix(st.range(0), 24, 4);
  for (auto _ : st) benchmark::DoNotOptimize(Kernel(t));
  st.SetItemsProcessed(st.iterations() * t.rows());
}

template <Vector (*Kernel)(const Matrix&)>
void BM_ColumnMeans(benchmark::State& st) {
  const Matrix t = random_matrix(st.range(0), 24, 5);
  for (auto _ : st) benchmark::DoNotOptimize(Kernel(t));
  st.SetItemsProcessed(st.iterations() * t.rows());
}

}  // namespace

BENCHMARK(BM_Knn<kernels::knn_predict_serial>)->Name("knn_predict/serial")->Arg(1000)->Arg(10000);
BENCHMARK(BM_Knn<kernels::knn_predict_parallel>)->Name("knn_predict/parallel")->Arg(1000)->Arg(10000);
BENCHMARK(BM_Gram<kernels::gram_serial>)->Name("gram/serial")->Arg(10000)->Arg(100000);
BENCHMARK(BM_Gram<kernels::gram_parallel>)->Name("gram/parallel")->Arg(10000)->Arg(100000);
BENCHMARK(BM_ColumnMeans<kernels::column_means_serial>)->Name("column_means/serial")->Arg(10000)->Arg(100000);
BENCHMARK(BM_ColumnMeans<kernels::column_means_parallel>)->Name("column_means/parallel")->Arg(10000)->Arg(100000);

BENCHMARK_MAIN();
