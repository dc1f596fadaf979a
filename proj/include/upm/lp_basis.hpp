#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "upm/numeric.hpp"
#include "upm/parallel.hpp"

namespace upm {

// Shifted orthonormal Legendre polynomials on [0,1]:
//   Leg_j(u) = sqrt(2j+1) * sum_k (-1)^(j+k) C(j,k) C(j+k,k) u^k.
// The integer coefficients are kept exactly for degrees up to kMaxExactDegree;
// evaluation always runs the three-term recurrence.
class LegendreBasis {
 public:
  static constexpr int kMaxExactDegree = 25;

  explicit LegendreBasis(int max_degree);

  int max_degree() const noexcept { return max_degree_; }

  double value(int j, double u) const;
  // A_j(u) = integral of Leg_j over [0,u]; A_j(0) = A_j(1) = 0 for j >= 1.
  double antiderivative(int j, double u) const;

  // Integer coefficients of the unnormalized shifted polynomial, lowest power first.
  std::span<const std::int64_t> integer_coefficients(int j) const;
  static double normalizer(int j);

 private:
  int max_degree_;
  std::vector<std::vector<std::int64_t>> coefficients_;
};

// Leg_j(u) for u in [0,1]; throws DomainError outside.
double eval_legendre(int j, double u);
double legendre_antiderivative(int j, double u);

// Fills out[j-1] = Leg_j(u) for j = 1..out.size(); no domain check.
void legendre_values(double u, std::span<double> out);
// Fills out[j-1] = A_j(u) for j = 1..out.size().
void legendre_antiderivatives(double u, std::span<double> out);

// Empirical LP rank-polynomial basis of one variable. Values are tabulated at
// the distinct sample points; evaluation elsewhere uses the right-continuous
// step of the empirical mid-distribution, clamped at both ends.
class LPBasis {
 public:
  static LPBasis build(std::span<const double> sample, int degree);

  // Rebuilds a basis from serialized parts without recomputation.
  static LPBasis from_parts(std::vector<double> distinct, std::vector<double> pmf,
                            std::vector<double> mid, Matrix table, Matrix power_coefficients,
                            std::size_t sample_size, int requested_degree);

  int degree() const noexcept { return static_cast<int>(table_.cols()); }
  int requested_degree() const noexcept { return requested_degree_; }
  std::size_t sample_size() const noexcept { return sample_size_; }
  std::size_t distinct_count() const noexcept { return distinct_.size(); }

  std::span<const double> distinct_values() const noexcept { return distinct_; }
  std::span<const double> pmf() const noexcept { return pmf_; }
  std::span<const double> mid_distribution() const noexcept { return mid_; }

  // K x m table: row k holds T_1..T_m at the k-th distinct value.
  const Matrix& table() const noexcept { return table_; }
  // m x (m+1): T_j = sum_k C(j-1, k) * T_1^k.
  const Matrix& power_coefficients() const noexcept { return power_coefficients_; }

  std::size_t locate(double z) const noexcept;
  double mid_distribution_at(double z) const noexcept { return mid_[locate(z)]; }

  double eval(double z, int j) const;
  void eval_all(double z, std::span<double> out) const;
  // N x m matrix of basis values at `points`.
  Matrix values(std::span<const double> points) const;

 private:
  std::vector<double> distinct_;
  std::vector<double> pmf_;
  std::vector<double> mid_;
  Matrix table_;
  Matrix power_coefficients_;
  std::size_t sample_size_ = 0;
  int requested_degree_ = 0;
};

LPBasis build_lp_basis(std::span<const double> sample, int degree);
double eval_lp_basis(const LPBasis& basis, double z, int j);

struct FeatureLabel {
  std::size_t variable = 0;  // column in the source matrix
  int degree = 0;
  std::string name;
};

// Per-column LP bases of a covariate matrix, stacked as [T_X1 | T_X2 | ...].
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(std::size_t input_dim, std::vector<std::size_t> columns, std::vector<LPBasis> bases,
             std::vector<std::string> names);

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t output_dim() const noexcept { return labels_.size(); }
  const std::vector<FeatureLabel>& labels() const noexcept { return labels_; }
  const std::vector<std::size_t>& columns() const noexcept { return columns_; }
  const std::vector<LPBasis>& bases() const noexcept { return bases_; }
  // Input columns dropped because they had a single distinct value.
  const std::vector<std::size_t>& skipped() const noexcept { return skipped_; }
  const std::vector<std::string>& names() const noexcept { return names_; }

  void transform_row(std::span<const double> x, std::span<double> out) const;
  std::vector<double> transform_row(std::span<const double> x) const;
  Matrix transform(const Matrix& x, Execution exec = Execution::Parallel) const;

 private:
  std::size_t input_dim_ = 0;
  std::vector<std::size_t> columns_;
  std::vector<LPBasis> bases_;
  std::vector<std::string> names_;
  std::vector<FeatureLabel> labels_;
  std::vector<std::size_t> skipped_;
};

struct FeatureMatrix {
  Matrix values;
  FeatureMap map;
};

// Per-column effective degree is min(max_degree, distinct - 1); constant columns
// are skipped and listed in FeatureMap::skipped().
FeatureMap build_feature_map(const Matrix& data, int max_degree,
                             const std::vector<std::string>& names = {});
FeatureMatrix lp_feature_matrix(const Matrix& data, int max_degree,
                                const std::vector<std::string>& names = {},
                                Execution exec = Execution::Parallel);

}  // namespace upm
