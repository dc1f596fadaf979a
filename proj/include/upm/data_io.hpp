#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "upm/numeric.hpp"

namespace upm {

struct Dataset {
  Matrix x;
  std::vector<double> y;
  std::optional<std::vector<double>> treatment;
  std::vector<std::string> feature_names;
  std::string response_name = "y";
  std::string provenance;
  std::size_t dropped_rows = 0;

  std::size_t size() const noexcept { return y.size(); }
};

// y = s x + e with x ~ U(-4,4), s = +-1 equiprobable and e ~ N(0,1).
Dataset gen_butterfly(std::size_t n, std::uint64_t seed);
// Conditional cdf of the butterfly law: (Phi(y - x) + Phi(y + x)) / 2.
double butterfly_conditional_cdf(double x, double y);

enum class HeteroKind { Location, Scale, Skew, Treatment };

HeteroKind parse_hetero_kind(const std::string& name);
std::string hetero_name(HeteroKind kind);

struct HeteroParams {
  double beta = 1.0;   // location slope
  double delta = 1.0;  // treatment location shift
  double gamma = 0.0;  // treatment scale change
};

struct HeteroDataset {
  Dataset data;
  // F(y | row covariates, treatment) for the generating law.
  std::function<double(std::span<const double> x, double z, double y)> conditional_cdf;
};

// location: x ~ U(-2,2), y = beta x + e.
// scale:    x ~ U(-2,2), y = (1 + |x|) e.
// skew:     x ~ U(-2,2), y = e for x < 0, y = E - 1 with E ~ Exp(1) otherwise.
// treatment: x ~ U(0,1), z ~ Bernoulli(1/2), y = x + delta z + (1 + gamma z) e.
HeteroDataset gen_heteroscedastic(HeteroKind kind, std::size_t n, const HeteroParams& params, std::uint64_t seed);

struct CsvOptions {
  std::string response;
  std::optional<std::string> treatment;
  std::vector<std::string> features;  // empty: every other column
};

Dataset load_csv(const std::string& path, const CsvOptions& options);

// Writes header + rows; used for datasets, curves and bar data.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);
void write_dataset_csv(const std::string& path, const Dataset& data);

// Holdout size floor(fraction * N); uniform partition without replacement.
std::pair<Dataset, Dataset> split(const Dataset& data, double holdout_fraction, std::uint64_t seed);

Dataset subset(const Dataset& data, const std::vector<std::size_t>& rows);

}  // namespace upm
