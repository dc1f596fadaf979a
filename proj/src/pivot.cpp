#include "upm/pivot.hpp"

#include <algorithm>
#include <cmath>

#include "upm/error.hpp"
#include "upm/numeric.hpp"

namespace upm {

double silverman_bandwidth(std::span<const double> sample) {
  require(sample.size() >= 2, ErrorCode::EmptySample, "bandwidth rule needs at least two values");
  std::vector<double> v(sample.begin(), sample.end());
  const double sd = sample_sd(v);
  const double iqr = empirical_quantile(v, 0.75) - empirical_quantile(v, 0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  require(spread > 0.0, ErrorCode::ConstantColumn, "cannot smooth a constant sample");
  return 0.9 * spread * std::pow(static_cast<double>(v.size()), -0.2);
}

Pivot Pivot::gaussian(double mu, double sigma) {
  require(std::isfinite(mu) && std::isfinite(sigma) && sigma > 0.0, ErrorCode::InvalidArgument,
          "Gaussian pivot needs finite mu and sigma > 0");
  Pivot p;
  p.kind_ = Kind::Gaussian;
  p.mu_ = mu;
  p.sigma_ = sigma;
  return p;
}

Pivot Pivot::empirical_marginal(std::span<const double> sample, std::optional<double> bandwidth) {
  require(!sample.empty(), ErrorCode::EmptySample, "empirical pivot needs a sample");
  Pivot p;
  p.kind_ = Kind::EmpiricalMarginal;
  p.sample_.assign(sample.begin(), sample.end());
  require(std::all_of(p.sample_.begin(), p.sample_.end(), [](double v) { return std::isfinite(v); }),
          ErrorCode::DomainError, "empirical pivot sample has non-finite values");
  std::sort(p.sample_.begin(), p.sample_.end());
  if (bandwidth) {
    require(std::isfinite(*bandwidth) && *bandwidth > 0.0, ErrorCode::InvalidArgument,
            "kernel bandwidth must be positive");
    p.bandwidth_ = *bandwidth;
  } else {
    p.bandwidth_ = silverman_bandwidth(p.sample_);
  }
  p.mu_ = mean(p.sample_);
  p.sigma_ = p.sample_.size() >= 2 ? sample_sd(p.sample_) : p.bandwidth_;
  return p;
}

Pivot Pivot::custom(Function pdf, Function cdf, Function quantile, std::string label) {
  require(pdf && cdf && quantile, ErrorCode::InvalidArgument, "custom pivot needs pdf, cdf and quantile");
  Pivot p;
  p.kind_ = Kind::Custom;
  p.pdf_ = std::move(pdf);
  p.cdf_ = std::move(cdf);
  p.quantile_ = std::move(quantile);
  p.label_ = std::move(label);
  return p;
}

std::string Pivot::name() const {
  switch (kind_) {
    case Kind::Gaussian:
      return "gaussian";
    case Kind::EmpiricalMarginal:
      return "empirical_marginal";
    case Kind::Custom:
      return label_;
  }
  return "unknown";
}

double Pivot::pdf(double y) const {
  switch (kind_) {
    case Kind::Gaussian:
      return normal_pdf((y - mu_) / sigma_) / sigma_;
    case Kind::EmpiricalMarginal: {
      // Kernels more than 40 bandwidths away contribute nothing in double precision.
      const double h = bandwidth_;
      const auto lo = std::lower_bound(sample_.begin(), sample_.end(), y - 40.0 * h);
      const auto hi = std::upper_bound(sample_.begin(), sample_.end(), y + 40.0 * h);
      double s = 0.0;
      for (auto it = lo; it != hi; ++it) s += normal_pdf((y - *it) / h);
      return s / (static_cast<double>(sample_.size()) * h);
    }
    case Kind::Custom:
      return pdf_(y);
  }
  return 0.0;
}

double Pivot::cdf(double y) const {
  switch (kind_) {
    case Kind::Gaussian:
      return normal_cdf((y - mu_) / sigma_);
    case Kind::EmpiricalMarginal: {
      const double h = bandwidth_;
      const auto lo = std::lower_bound(sample_.begin(), sample_.end(), y - 40.0 * h);
      const auto hi = std::upper_bound(sample_.begin(), sample_.end(), y + 40.0 * h);
      // Points left of the window contribute exactly 1.
      double s = static_cast<double>(lo - sample_.begin());
      for (auto it = lo; it != hi; ++it) s += normal_cdf((y - *it) / h);
      return std::clamp(s / static_cast<double>(sample_.size()), 0.0, 1.0);
    }
    case Kind::Custom:
      return cdf_(y);
  }
  return 0.0;
}

double Pivot::quantile(double p) const {
  require(p > 0.0 && p < 1.0, ErrorCode::DomainError, "pivot quantile needs p in (0,1)");
  switch (kind_) {
    case Kind::Gaussian:
      return mu_ + sigma_ * normal_quantile(p);
    case Kind::EmpiricalMarginal: {
      // The kernel mixture lies between its extreme components.
      double lo = sample_.front() + bandwidth_ * normal_quantile(p);
      double hi = sample_.back() + bandwidth_ * normal_quantile(p);
      if (hi <= lo) return lo;
      for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) < p)
          lo = mid;
        else
          hi = mid;
      }
      return hi;
    }
    case Kind::Custom:
      return quantile_(p);
  }
  return 0.0;
}

}  // namespace upm
