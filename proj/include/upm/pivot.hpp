#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace upm {

// Reference density f0 with pdf, cdf and quantile access.
class Pivot {
 public:
  enum class Kind { Gaussian, EmpiricalMarginal, Custom };

  using Function = std::function<double(double)>;

  Pivot() = default;  // standard Gaussian

  static Pivot gaussian(double mu, double sigma);
  // Gaussian-kernel smoothing of `sample`; Silverman's rule when no bandwidth is given.
  static Pivot empirical_marginal(std::span<const double> sample, std::optional<double> bandwidth = std::nullopt);
  static Pivot custom(Function pdf, Function cdf, Function quantile, std::string label = "custom");

  Kind kind() const noexcept { return kind_; }
  std::string name() const;

  double pdf(double y) const;
  double cdf(double y) const;
  // Right-inverse of cdf; p must lie in (0,1).
  double quantile(double p) const;

  double mu() const noexcept { return mu_; }
  double sigma() const noexcept { return sigma_; }
  double bandwidth() const noexcept { return bandwidth_; }
  const std::vector<double>& sample() const noexcept { return sample_; }

 private:
  Kind kind_ = Kind::Gaussian;
  double mu_ = 0.0;
  double sigma_ = 1.0;
  double bandwidth_ = 0.0;
  std::vector<double> sample_;  // sorted
  Function pdf_;
  Function cdf_;
  Function quantile_;
  std::string label_;
};

using PivotSpec = Pivot;

double silverman_bandwidth(std::span<const double> sample);

}  // namespace upm
