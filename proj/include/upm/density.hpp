#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "upm/contrast.hpp"
#include "upm/pivot.hpp"

namespace upm {

// f(y) = f0(y) * d(F0(y)) for a pivot f0 and a clipped, renormalized contrast d.
class ConditionalDensity {
 public:
  ConditionalDensity(Pivot pivot, LPCoefficients coefficients);

  const Pivot& pivot() const noexcept { return pivot_; }
  const LPCoefficients& coefficients() const noexcept { return coefficients_; }
  const UnitContrast& contrast() const noexcept { return contrast_; }
  double normalizer() const noexcept { return contrast_.normalizer(); }

  double pdf(double y) const;
  double cdf(double y) const;
  // Bisection inverse of cdf to 1e-9 in y; u in (0,1).
  double quantile(double u) const;

  // Numeric moments of the fitted density.
  double mean() const;
  double sd() const;
  // E g(Y) under the fitted density by Simpson over the pivot's effective support.
  double expectation(const std::function<double(double)>& g) const;

 private:
  std::pair<double, double> support() const;

  Pivot pivot_;
  LPCoefficients coefficients_;
  UnitContrast contrast_;
  mutable std::optional<std::pair<double, double>> moments_;
};

double conditional_pdf(const ConditionalDensity& cd, double y);
double conditional_cdf(const ConditionalDensity& cd, double y);
double conditional_quantile(const ConditionalDensity& cd, double u);

enum class RegionKind { Quantile, Gaussian, HighestDensity };

std::string region_name(RegionKind kind);
RegionKind parse_region_kind(const std::string& name);

struct PredictionRegion {
  RegionKind kind = RegionKind::Quantile;
  double level = 0.0;  // 1 - alpha
  std::vector<std::pair<double, double>> intervals;
  double total_length = 0.0;
  double mass = 0.0;  // achieved probability under the fitted density
};

struct RegionOptions {
  int grid_points = 4001;
  double tail = 1e-4;
  double tolerance = 0.005;
};

PredictionRegion prediction_region(const ConditionalDensity& cd, double alpha, RegionKind kind,
                                   const RegionOptions& options = {});

// (1/N) sum_i w_i psi(y_i) with weights w_i = d(F~(y_i)) from the clipped
// contrast at x; needs a model fitted with empirical-marginal response scores.
// An empty y_sample means the training responses.
double d_kernel_expectation(const ContrastModel& model, std::span<const double> x,
                            const std::function<double(double)>& psi, std::span<const double> y_sample = {});

struct Curve {
  std::vector<double> grid;
  std::vector<double> values;
};

Curve pdf_curve(const ConditionalDensity& cd, std::span<const double> grid);
Curve cdf_curve(const ConditionalDensity& cd, std::span<const double> grid);
Curve quantile_curve(const ConditionalDensity& cd, std::span<const double> levels);

}  // namespace upm
