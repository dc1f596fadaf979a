#pragma once

#include "upm/learners.hpp"
#include "upm/numeric.hpp"

// Data-parallel hot loops. Each has a plain serial reference used by the tests
// and benchmarks; the parallel versions must agree with them exactly unless
// noted otherwise.
namespace upm::kernels {

// k-nearest-neighbour mean for every query row. The reference sorts all
// distances per query; the parallel version uses a partial selection.
Vector knn_predict_serial(const KnnState& state, const Matrix& queries);
Vector knn_predict_parallel(const KnnState& state, const Matrix& queries);

// (1/N) T^T T. The parallel version splits over output columns and keeps the
// reference summation order, so results are bit-identical.
Matrix gram_serial(const Matrix& t);
Matrix gram_parallel(const Matrix& t);

// Column means (1/N) sum_i T_ij.
Vector column_means_serial(const Matrix& t);
Vector column_means_parallel(const Matrix& t);

}  // namespace upm::kernels
