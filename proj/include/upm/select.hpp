#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "upm/learners.hpp"
#include "upm/numeric.hpp"

namespace upm {

struct OvisOptions {
  std::vector<int> orders = {1, 2, 3};
  // Feature degree for the robust variant; first-order scores by default.
  int m_x = 1;
  // Regress on LP scores of X (true) or on X itself (false).
  bool robust = true;
  // Fixed penalty; empty selects lambda by BIC along the path.
  std::optional<double> lambda;
  std::vector<std::string> feature_names;
  Execution execution = Execution::Parallel;
};

struct OvisFeature {
  std::string name;
  double score = 0.0;
  std::vector<double> per_order;  // contribution of each requested order
};

struct OvisReport {
  std::vector<int> orders;
  std::vector<OvisFeature> features;  // input column order
  // coefficients[o][l][k-1] = beta^{(j)}_{lk} for orders[o], feature l, degree k (working scale).
  std::vector<std::vector<std::vector<double>>> coefficients;
  std::vector<std::vector<std::size_t>> selected;  // Theta_j per requested order
  std::vector<double> lambdas;

  // Feature indices by decreasing score; ties keep input order.
  std::vector<std::size_t> ranking() const;
};

OvisReport shape_predictors(const Matrix& x, std::span<const double> y, const OvisOptions& options = {});

}  // namespace upm
