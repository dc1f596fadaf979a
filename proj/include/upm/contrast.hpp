#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "upm/learners.hpp"
#include "upm/lp_basis.hpp"
#include "upm/pivot.hpp"

namespace upm {

struct LPCoefficients {
  std::vector<double> x;       // query point
  std::vector<double> values;  // LP_1..LP_m
  std::optional<double> threshold;
};

// d(u) = max(0, 1 + sum_j c_j Leg_j(u)) / Z on [0,1].
class UnitContrast {
 public:
  static constexpr int kGridPoints = 2001;

  UnitContrast() : UnitContrast(std::vector<double>{}) {}
  explicit UnitContrast(std::vector<double> coefficients);

  const std::vector<double>& coefficients() const noexcept { return coefficients_; }
  double raw(double u) const;
  double operator()(double u) const { return value(u); }
  double value(double u) const;
  double normalizer() const noexcept { return z_; }
  // True when the unclipped series is nonnegative on the whole grid.
  bool nonnegative() const noexcept { return segments_.empty(); }
  // Grid maximum of the clipped, renormalized density.
  double grid_max() const noexcept { return grid_max_; }
  double cdf(double u) const;

 private:
  double antiderivative(double u) const;  // u + sum_j c_j A_j(u)

  struct Segment {
    double lo, hi, before;  // positive part [lo,hi], mass left of lo
  };

  std::vector<double> coefficients_;
  double z_ = 1.0;
  double grid_max_ = 1.0;
  double positive_mass_ = 1.0;
  std::vector<Segment> segments_;
};

double contrast_density(const LPCoefficients& coeffs, double u);
double contrast_density_raw(const LPCoefficients& coeffs, double u);
// Pivot lack-of-fit energy sum_j LP_j^2.
double qpivot(const LPCoefficients& coeffs);

struct ContrastConfig {
  int m_x = 4;
  int m_y = 6;
  LearnerSpec learner = LearnerSpec::knn(15);
  // Explicit pivot for the response scores; empty selects the empirical LP basis of y.
  std::optional<Pivot> pivot;
  std::vector<std::string> feature_names;
  Execution execution = Execution::Parallel;
};

class ConditionalDensity;

class ContrastModel {
 public:
  ContrastModel() = default;
  ContrastModel(FeatureMap features, std::optional<LPBasis> response_basis, Pivot pivot,
                std::vector<FittedLearner> learners, std::vector<double> training_y, LearnerSpec spec);

  bool marginal_scores() const noexcept { return response_basis_.has_value(); }
  int m_y() const noexcept { return static_cast<int>(learners_.size()); }
  std::size_t input_dim() const noexcept { return features_.input_dim(); }
  std::size_t sample_size() const noexcept { return training_y_.size(); }

  const FeatureMap& features() const noexcept { return features_; }
  const std::optional<LPBasis>& response_basis() const noexcept { return response_basis_; }
  // Density pivot: the explicit pivot, or a kernel-smoothed marginal of y.
  const Pivot& pivot() const noexcept { return pivot_; }
  const std::vector<FittedLearner>& learners() const noexcept { return learners_; }
  const std::vector<double>& training_y() const noexcept { return training_y_; }
  const LearnerSpec& learner_spec() const noexcept { return spec_; }

  // Response scores T_1..T_m at y under the model's scoring rule.
  std::vector<double> response_scores(double y) const;

  LPCoefficients coefficients_at(std::span<const double> x, std::optional<double> threshold = std::nullopt) const;
  std::vector<LPCoefficients> coefficients_at(const Matrix& x, std::optional<double> threshold = std::nullopt,
                                              Execution exec = Execution::Parallel) const;
  ConditionalDensity density_at(std::span<const double> x, std::optional<double> threshold = std::nullopt) const;

 private:
  FeatureMap features_;
  std::optional<LPBasis> response_basis_;
  Pivot pivot_;
  std::vector<FittedLearner> learners_;
  std::vector<double> training_y_;
  LearnerSpec spec_;
};

ContrastModel fit_contrast(const Matrix& x, std::span<const double> y, const ContrastConfig& config = {});
LPCoefficients coefficients_at(const ContrastModel& model, std::span<const double> x,
                               std::optional<double> threshold = std::nullopt);

// Zeroes entries with |c| < threshold.
std::vector<double> apply_threshold(std::vector<double> values, std::optional<double> threshold);

}  // namespace upm
