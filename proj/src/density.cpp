#include "upm/density.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "upm/error.hpp"
#include "upm/numeric.hpp"

namespace upm {

namespace {

constexpr int kMomentPoints = 8001;
constexpr double kMomentTail = 1e-10;

}  // namespace

ConditionalDensity::ConditionalDensity(Pivot pivot, LPCoefficients coefficients)
    : pivot_(std::move(pivot)), coefficients_(std::move(coefficients)), contrast_(coefficients_.values) {}

double ConditionalDensity::pdf(double y) const {
  const double f0 = pivot_.pdf(y);
  if (!(f0 > 0.0)) return 0.0;
  return f0 * contrast_.value(pivot_.cdf(y));
}

double ConditionalDensity::cdf(double y) const {
  if (y == -std::numeric_limits<double>::infinity()) return 0.0;
  if (y == std::numeric_limits<double>::infinity()) return 1.0;
  return contrast_.cdf(pivot_.cdf(y));
}

double ConditionalDensity::quantile(double u) const {
  require(u > 0.0 && u < 1.0, ErrorCode::DomainError, "conditional quantile needs u in (0,1)");
  double lo = pivot_.quantile(1e-6);
  double hi = pivot_.quantile(1.0 - 1e-6);
  for (int it = 0; it < 60 && cdf(lo) > u; ++it) lo -= (hi - lo);
  for (int it = 0; it < 60 && cdf(hi) < u; ++it) hi += (hi - lo);
  for (int it = 0; it < 200; ++it) {
    if (hi - lo <= 1e-9 * std::max(1.0, std::abs(lo))) break;
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < u)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::pair<double, double> ConditionalDensity::support() const {
  return {pivot_.quantile(kMomentTail), pivot_.quantile(1.0 - kMomentTail)};
}

double ConditionalDensity::expectation(const std::function<double(double)>& g) const {
  const auto [a, b] = support();
  std::vector<double> f(kMomentPoints);
  std::vector<double> gf(kMomentPoints);
  for (int i = 0; i < kMomentPoints; ++i) {
    const double y = a + (b - a) * i / (kMomentPoints - 1);
    f[i] = pdf(y);
    gf[i] = g(y) * f[i];
  }
  return simpson_values(gf, a, b) / simpson_values(f, a, b);
}

double ConditionalDensity::mean() const {
  if (!moments_) {
    const double m1 = expectation([](double y) { return y; });
    const double var = expectation([m1](double y) { return (y - m1) * (y - m1); });
    moments_ = std::make_pair(m1, std::sqrt(std::max(var, 0.0)));
  }
  return moments_->first;
}

double ConditionalDensity::sd() const {
  mean();
  return moments_->second;
}

double conditional_pdf(const ConditionalDensity& cd, double y) { return cd.pdf(y); }
double conditional_cdf(const ConditionalDensity& cd, double y) { return cd.cdf(y); }
double conditional_quantile(const ConditionalDensity& cd, double u) { return cd.quantile(u); }

std::string region_name(RegionKind kind) {
  switch (kind) {
    case RegionKind::Quantile:
      return "qPI";
    case RegionKind::Gaussian:
      return "gPI";
    case RegionKind::HighestDensity:
      return "hdPI";
  }
  return "unknown";
}

RegionKind parse_region_kind(const std::string& name) {
  std::string n = name;
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
  if (n == "qpi" || n == "quantile") return RegionKind::Quantile;
  if (n == "gpi" || n == "gaussian") return RegionKind::Gaussian;
  if (n == "hdpi" || n == "hdr" || n == "highest-density") return RegionKind::HighestDensity;
  fail(ErrorCode::InvalidArgument, "unknown region kind '" + name + "'");
}

namespace {

struct HdrScan {
  const ConditionalDensity& cd;
  std::vector<double> ys;
  std::vector<double> fs;

  double crossing(double a, double b, double tau) const {
    // f(a) and f(b) lie on opposite sides of tau.
    const bool a_above = cd.pdf(a) > tau;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (a + b);
      if ((cd.pdf(mid) > tau) == a_above)
        a = mid;
      else
        b = mid;
    }
    return 0.5 * (a + b);
  }

  std::vector<std::pair<double, double>> region(double tau) const {
    std::vector<std::pair<double, double>> out;
    const std::size_t n = ys.size();
    double start = 0.0;
    bool inside = false;
    for (std::size_t i = 0; i < n; ++i) {
      const bool above = fs[i] > tau;
      if (above && !inside) {
        start = i == 0 ? ys[0] : crossing(ys[i - 1], ys[i], tau);
        inside = true;
      } else if (!above && inside) {
        out.emplace_back(start, crossing(ys[i - 1], ys[i], tau));
        inside = false;
      }
    }
    if (inside) out.emplace_back(start, ys.back());
    return out;
  }

  double mass(const std::vector<std::pair<double, double>>& r) const {
    double m = 0.0;
    for (const auto& [a, b] : r) m += cd.cdf(b) - cd.cdf(a);
    return m;
  }
};

PredictionRegion finish(RegionKind kind, double level, std::vector<std::pair<double, double>> intervals,
                        const ConditionalDensity& cd) {
  PredictionRegion r;
  r.kind = kind;
  r.level = level;
  r.intervals = std::move(intervals);
  for (const auto& [a, b] : r.intervals) {
    r.total_length += b - a;
    r.mass += cd.cdf(b) - cd.cdf(a);
  }
  return r;
}

}  // namespace

PredictionRegion prediction_region(const ConditionalDensity& cd, double alpha, RegionKind kind,
                                   const RegionOptions& options) {
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidArgument, "alpha must lie in (0,1)");
  const double level = 1.0 - alpha;
  switch (kind) {
    case RegionKind::Quantile:
      return finish(kind, level, {{cd.quantile(0.5 * alpha), cd.quantile(1.0 - 0.5 * alpha)}}, cd);
    case RegionKind::Gaussian: {
      const double z = normal_quantile(1.0 - 0.5 * alpha);
      return finish(kind, level, {{cd.mean() - z * cd.sd(), cd.mean() + z * cd.sd()}}, cd);
    }
    case RegionKind::HighestDensity:
      break;
  }

  require(options.grid_points >= 3 && options.tail > 0.0 && options.tail < 0.5, ErrorCode::InvalidArgument,
          "invalid highest-density grid options");
  const double lo = cd.quantile(options.tail);
  const double hi = cd.quantile(1.0 - options.tail);
  int points = options.grid_points;
  double best_gap = 1.0;
  for (int attempt = 0; attempt < 2; ++attempt, points = 2 * points - 1) {
    HdrScan scan{cd, linspace(lo, hi, points), {}};
    scan.fs.resize(scan.ys.size());
    for (std::size_t i = 0; i < scan.ys.size(); ++i) scan.fs[i] = cd.pdf(scan.ys[i]);
    double tau_lo = 0.0;
    double tau_hi = *std::max_element(scan.fs.begin(), scan.fs.end());
    auto best = scan.region(tau_lo);
    double best_mass = scan.mass(best);
    for (int it = 0; it < 100; ++it) {
      const double tau = 0.5 * (tau_lo + tau_hi);
      auto r = scan.region(tau);
      const double m = scan.mass(r);
      if (m >= level) {
        tau_lo = tau;
        best = std::move(r);
        best_mass = m;
        if (m - level < 1e-9) break;
      } else {
        tau_hi = tau;
      }
    }
    best_gap = std::abs(best_mass - level);
    if (best_gap <= options.tolerance) return finish(kind, level, std::move(best), cd);
  }
  std::ostringstream msg;
  msg << "highest-density region missed its coverage by " << std::scientific << std::setprecision(2) << best_gap;
  fail(ErrorCode::GridTooCoarse, msg.str());
}

double d_kernel_expectation(const ContrastModel& model, std::span<const double> x,
                            const std::function<double(double)>& psi, std::span<const double> y_sample) {
  require(model.marginal_scores(), ErrorCode::InvalidArgument,
          "d-kernel weights need a model fitted with empirical-marginal response scores");
  const std::span<const double> ys = y_sample.empty() ? std::span<const double>(model.training_y()) : y_sample;
  require(!ys.empty(), ErrorCode::EmptySample, "d-kernel expectation needs responses");
  const UnitContrast d(model.coefficients_at(x).values);
  const LPBasis& basis = *model.response_basis();
  double s = 0.0;
  for (double y : ys) s += d.value(basis.mid_distribution_at(y)) * psi(y);
  return s / static_cast<double>(ys.size());
}

Curve pdf_curve(const ConditionalDensity& cd, std::span<const double> grid) {
  Curve c{{grid.begin(), grid.end()}, {}};
  for (double y : grid) c.values.push_back(cd.pdf(y));
  return c;
}

Curve cdf_curve(const ConditionalDensity& cd, std::span<const double> grid) {
  Curve c{{grid.begin(), grid.end()}, {}};
  for (double y : grid) c.values.push_back(cd.cdf(y));
  return c;
}

Curve quantile_curve(const ConditionalDensity& cd, std::span<const double> levels) {
  Curve c{{levels.begin(), levels.end()}, {}};
  for (double u : levels) c.values.push_back(cd.quantile(u));
  return c;
}

}  // namespace upm
