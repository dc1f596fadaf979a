#include "upm/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <omp.h>

#include "upm/error.hpp"
#include "upm/parallel.hpp"

namespace upm {

int max_threads() { return omp_get_max_threads(); }

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector to_eigen(std::span<const double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), out.data());
  return out;
}

double simpson(const std::function<double(double)>& f, double a, double b, int points) {
  require(points >= 3 && points % 2 == 1, ErrorCode::InvalidArgument,
          "Simpson rule needs an odd number (>= 3) of nodes");
  const double h = (b - a) / (points - 1);
  double sum = f(a) + f(b);
  for (int i = 1; i < points - 1; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * f(a + i * h);
  return sum * h / 3.0;
}

double simpson_values(std::span<const double> values, double a, double b) {
  const auto points = static_cast<int>(values.size());
  require(points >= 3 && points % 2 == 1, ErrorCode::InvalidArgument,
          "Simpson rule needs an odd number (>= 3) of nodes");
  const double h = (b - a) / (points - 1);
  double sum = values.front() + values.back();
  for (int i = 1; i < points - 1; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * values[i];
  return sum * h / 3.0;
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double p) {
  require(p > 0.0 && p < 1.0, ErrorCode::DomainError, "normal quantile needs p in (0,1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), p);
}

double chi_squared_sf(double statistic, double dof) {
  if (!(statistic > 0.0)) return 1.0;
  if (std::isinf(statistic)) return 0.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(dof),
                                                  statistic));
}

double kolmogorov_sf(double t) {
  if (t <= 0.0) return 1.0;
  if (t < 1.0) {
    // Small-t form of the cdf converges much faster there.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double cdf = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double odd = 2.0 * k - 1.0;
      cdf += std::exp(-odd * odd * pi2 / (8.0 * t * t));
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / t;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sf = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    sf += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(sf, 0.0, 1.0);
}

namespace {

double stephens_p(double statistic, double effective_n) {
  const double root = std::sqrt(effective_n);
  return kolmogorov_sf(statistic * (root + 0.12 + 0.11 / root));
}

}  // namespace

double ks_uniform_statistic(std::span<const double> sample) {
  require(!sample.empty(), ErrorCode::EmptySample, "KS statistic of an empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double u = std::clamp(sorted[i], 0.0, 1.0);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - u, u - static_cast<double>(i) / n});
  }
  return d;
}

KsResult ks_uniform(std::span<const double> sample) {
  KsResult r;
  r.statistic = ks_uniform_statistic(sample);
  r.p_value = stephens_p(r.statistic, static_cast<double>(sample.size()));
  return r;
}

KsResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf) {
  std::vector<double> u(sample.size());
  std::transform(sample.begin(), sample.end(), u.begin(), cdf);
  return ks_uniform(u);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  require(!a.empty() && !b.empty(), ErrorCode::EmptySample, "two-sample KS needs nonempty samples");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  KsResult r;
  r.statistic = d;
  r.p_value = stephens_p(d, nx * ny / (nx + ny));
  return r;
}

double mean(std::span<const double> v) {
  require(!v.empty(), ErrorCode::EmptySample, "mean of an empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
  require(v.size() >= 2, ErrorCode::EmptySample, "standard deviation needs at least two values");
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double empirical_quantile(std::vector<double> sample, double p) {
  require(!sample.empty(), ErrorCode::EmptySample, "quantile of an empty sample");
  std::sort(sample.begin(), sample.end());
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(sample.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sample.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return (1.0 - w) * sample[lo] + w * sample[hi];
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<double> linspace(double a, double b, int points) {
  std::vector<double> out(static_cast<std::size_t>(std::max(points, 0)));
  if (points == 1) {
    out[0] = a;
    return out;
  }
  for (int i = 0; i < points; ++i) out[i] = a + (b - a) * i / (points - 1);
  return out;
}

}  // namespace upm
