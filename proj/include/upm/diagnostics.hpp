#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "upm/contrast.hpp"
#include "upm/numeric.hpp"
#include "upm/parallel.hpp"

namespace upm {

struct HCAComponent {
  int degree = 0;
  double r_squared = 0.0;
  double f_statistic = 0.0;
  double p_value = 1.0;
  bool significant = false;
};

struct HCAReport {
  std::vector<HCAComponent> components;
  int m = 0;  // retained feature columns
  std::size_t n = 0;
  double level = 0.05;
  std::vector<std::string> feature_labels;
};

// Regresses T_j(y) for j = 1..max_j on the stacked LP features of x.
HCAReport hca(const Matrix& x, std::span<const double> y, int m_x = 4, int max_j = 4, double level = 0.05,
              Execution exec = Execution::Parallel);

// F_j = R^2/(1-R^2) * (N-m-1)/m.
double hca_f_statistic(double r_squared, std::size_t n, int m);

std::vector<double> quantile_residuals(const ContrastModel& model, const Matrix& holdout_x,
                                       std::span<const double> holdout_y, Execution exec = Execution::Parallel);

struct QdivResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int m = 6;
  std::size_t n = 0;
};

QdivResult qdiv(std::span<const double> residuals, int m = 6);

struct GofReport {
  std::vector<double> residuals;
  QdivResult qdiv;
  KsResult ks;
  std::vector<std::pair<double, double>> qq;  // (uniform quantile, sorted residual)
};

GofReport goodness_of_fit(const ContrastModel& model, const Matrix& holdout_x, std::span<const double> holdout_y,
                          int m = 6, Execution exec = Execution::Parallel);

// int_0^1 d log d over the clipped contrast, on the 2001-point Simpson grid.
double contrast_entropy(const UnitContrast& d);

// int_0^1 d(u) log d(u) du for a possibly unbounded density d on (0,1).
// Uses u = s^2 (3 - 2s) to cluster nodes at both ends.
double kl_to_uniform(const std::function<double(double)>& d, int points = 20001);

double predictability_index(const ContrastModel& model, const Matrix& x_points,
                            Execution exec = Execution::Parallel);

}  // namespace upm
