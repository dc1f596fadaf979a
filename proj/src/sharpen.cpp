#include "upm/sharpen.hpp"

#include <algorithm>
#include <cmath>

#include "upm/error.hpp"
#include "upm/lp_basis.hpp"

namespace upm {

namespace {

std::vector<double> mid_distribution(const std::vector<double>& weak) {
  std::vector<double> sorted = weak;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<double> mid(weak.size());
  for (std::size_t i = 0; i < weak.size(); ++i) {
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), weak[i]) - sorted.begin();
    const auto hi = std::upper_bound(sorted.begin(), sorted.end(), weak[i]) - sorted.begin();
    mid[i] = (static_cast<double>(hi) - 0.5 * static_cast<double>(hi - lo)) / n;
  }
  return mid;
}

}  // namespace

Sharpener::Sharpener(std::span<const double> weak, std::function<double(double)> contrast, std::uint64_t seed)
    : weak_(weak.begin(), weak.end()), contrast_(std::move(contrast)), rng_(seed) {
  require(!weak_.empty(), ErrorCode::EmptySample, "sharpening needs weak samples");
  require(static_cast<bool>(contrast_), ErrorCode::InvalidArgument, "sharpening needs a contrast density");
  for (double v : weak_) require(std::isfinite(v), ErrorCode::DomainError, "weak samples must be finite");
  mid_ = mid_distribution(weak_);
  double top = 0.0;
  for (int i = 0; i < kGridPoints; ++i) top = std::max(top, contrast_(static_cast<double>(i) / (kGridPoints - 1)));
  envelope_ = kEnvelopeInflation * top;
  require(envelope_ > 0.0 && std::isfinite(envelope_), ErrorCode::EnvelopeDegenerate,
          "contrast density has no positive mass on the grid");
}

Sharpener::Sharpener(std::span<const double> weak, const UnitContrast& contrast, std::uint64_t seed)
    : Sharpener(weak, [contrast](double u) { return contrast.value(u); }, seed) {}

double Sharpener::acceptance_rate() const noexcept {
  return proposed_ == 0 ? 0.0 : static_cast<double>(accepted_) / static_cast<double>(proposed_);
}

double Sharpener::weak_mid(double y) const {
  std::vector<double> sorted = weak_;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  const auto hi = std::upper_bound(sorted.begin(), sorted.end(), y) - sorted.begin();
  if (hi == 0) return mid_[static_cast<std::size_t>(std::min_element(weak_.begin(), weak_.end()) - weak_.begin())];
  const double v = sorted[static_cast<std::size_t>(hi) - 1];
  const auto lo = std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin();
  return (static_cast<double>(hi) - 0.5 * static_cast<double>(hi - lo)) / n;
}

SharpenResult Sharpener::draw(std::size_t s) {
  require(s >= 1, ErrorCode::InvalidArgument, "sharpening needs s >= 1");
  const double cap = 1000.0 * static_cast<double>(s) * envelope_;
  std::uniform_int_distribution<std::size_t> pick(0, weak_.size() - 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  SharpenResult out;
  out.envelope = envelope_;
  std::size_t local = 0;
  while (out.samples.size() < s) {
    if (static_cast<double>(local) >= cap)
      fail(ErrorCode::IterationCap, "sharpening exhausted " + std::to_string(local) + " proposals");
    const std::size_t i = pick(rng_);
    const double u = unif(rng_);
    ++local;
    if (contrast_(mid_[i]) > u * envelope_) out.samples.push_back(weak_[i]);
  }
  proposed_ += local;
  accepted_ += s;
  out.proposals = local;
  out.acceptance_rate = static_cast<double>(s) / static_cast<double>(local);
  return out;
}

SharpenResult d_sharpen(std::span<const double> weak, const std::function<double(double)>& contrast,
                        std::size_t s, std::uint64_t seed) {
  Sharpener sharpener(weak, contrast, seed);
  return sharpener.draw(s);
}

std::vector<double> contrast_relative_to_weak(const ConditionalDensity& target, std::span<const double> weak, int m) {
  const LPBasis basis = LPBasis::build(weak, m);
  const auto values = basis.distinct_values();
  const Matrix& table = basis.table();
  std::vector<double> c(static_cast<std::size_t>(basis.degree()), 0.0);
  // The weak basis is a step function: T_j(z_k) on [z_k, z_{k+1}), extended to both ends.
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double lo = k == 0 ? 0.0 : target.cdf(values[k]);
    const double hi = k + 1 == values.size() ? 1.0 : target.cdf(values[k + 1]);
    const double p = hi - lo;
    for (std::size_t j = 0; j < c.size(); ++j) c[j] += table(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) * p;
  }
  return c;
}

}  // namespace upm
