#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "upm/contrast.hpp"
#include "upm/learners.hpp"
#include "upm/lp_basis.hpp"

namespace upm {

struct KSampleOrder {
  int order = 1;
  std::string name;               // KW, MOOD, SKEW, KURT
  bool available = true;          // false when the pooled basis has lower degree
  std::optional<double> direct;   // classical rank formula; empty with ties or for KURT
  double lp_value = 0.0;          // sum_l n_l LP~_{j|l}^2
  double n_r_squared = 0.0;       // N R_j^2 from a regression on group indicators
  double p_value = 1.0;           // chi-square with k-1 degrees of freedom, from lp_value
};

struct KSampleReport {
  std::vector<int> labels;  // sorted distinct group labels
  std::vector<std::size_t> group_sizes;
  std::size_t n = 0;
  bool ties = false;
  int dof = 0;
  std::vector<KSampleOrder> orders;
  // group_means[l][j-1] = LP~_{j|l}, the group mean of T_j(y) under the pooled basis.
  std::vector<std::vector<double>> group_means;
};

KSampleReport ksample(std::span<const double> y, std::span<const int> groups,
                      const std::vector<int>& orders = {1, 2, 3, 4});

// Classical pooled-rank statistics; tie-free samples only.
double kruskal_wallis_direct(std::span<const double> y, std::span<const int> groups);
double mood_direct(std::span<const double> y, std::span<const int> groups);
double skew_direct(std::span<const double> y, std::span<const int> groups);

struct PimModel {
  FeatureMap features;
  LinearState fit;

  double lp1(std::span<const double> x) const;
  // Comparison probability clamp(LP_1, -sqrt3, sqrt3)/sqrt12 + 1/2.
  double cpr(std::span<const double> x) const;
  std::vector<std::string> selected() const;
};

// Lasso (BIC path) regression of T_1(y) on the LP features of x.
PimModel pim(const Matrix& x, std::span<const double> y, int m_x = 4);

struct DIFPoint {
  std::vector<double> x;
  double value = 0.0;
  std::vector<double> components;  // (LP_{j|x,0} - LP_{j|x,1})^2
  std::vector<double> control;
  std::vector<double> treated;
};

struct DIFReport {
  std::vector<DIFPoint> points;
  int m_y = 0;
};

ContrastConfig dif_default_config();

// Fits one contrast model on the covariates (x, z) and compares the arms at each query row.
DIFReport dif(const Matrix& x, std::span<const double> z, std::span<const double> y, const Matrix& queries,
              const ContrastConfig& config = dif_default_config());

}  // namespace upm
