#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace upm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

std::vector<double> to_std(const Vector& v);
Vector to_eigen(std::span<const double> v);

// Composite Simpson rule on `points` equispaced nodes over [a, b];
// `points` must be odd and >= 3.
double simpson(const std::function<double(double)>& f, double a, double b, int points);
double simpson_values(std::span<const double> values, double a, double b);

double normal_pdf(double z);
double normal_cdf(double z);
double normal_quantile(double p);

// Upper tail of the chi-square distribution with `dof` degrees of freedom.
double chi_squared_sf(double statistic, double dof);

// Asymptotic Kolmogorov survival function P(K > t).
double kolmogorov_sf(double t);

// Sup-distance between the empirical cdf of `sample` and Uniform[0,1].
double ks_uniform_statistic(std::span<const double> sample);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

KsResult ks_uniform(std::span<const double> sample);
KsResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

double mean(std::span<const double> v);
double sample_sd(std::span<const double> v);

// Linear-interpolated empirical quantile of an unsorted sample, p in [0,1].
double empirical_quantile(std::vector<double> sample, double p);

// SplitMix64 finalizer; used to derive independent per-task seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

std::vector<double> linspace(double a, double b, int points);

}  // namespace upm
