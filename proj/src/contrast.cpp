#include "upm/contrast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "upm/density.hpp"
#include "upm/error.hpp"

namespace upm {

UnitContrast::UnitContrast(std::vector<double> coefficients) : coefficients_(std::move(coefficients)) {
  for (double c : coefficients_)
    require(std::isfinite(c), ErrorCode::DomainError, "contrast coefficients must be finite");
  const int n = kGridPoints;
  std::vector<double> raw_grid(n);
  std::vector<double> clipped(n);
  for (int i = 0; i < n; ++i) {
    raw_grid[i] = raw(static_cast<double>(i) / (n - 1));
    clipped[i] = std::max(0.0, raw_grid[i]);
  }
  z_ = simpson_values(clipped, 0.0, 1.0);
  grid_max_ = *std::max_element(clipped.begin(), clipped.end()) / z_;
  if (*std::min_element(raw_grid.begin(), raw_grid.end()) >= 0.0) return;

  // Positive parts between sign changes, with roots refined by bisection.
  const auto root = [&](double a, double b) {
    const bool a_pos = raw(a) > 0.0;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (a + b);
      if ((raw(mid) > 0.0) == a_pos)
        a = mid;
      else
        b = mid;
    }
    return 0.5 * (a + b);
  };
  double start = raw_grid[0] > 0.0 ? 0.0 : -1.0;
  double mass = 0.0;
  for (int i = 1; i < n; ++i) {
    const bool prev = raw_grid[i - 1] > 0.0;
    const bool cur = raw_grid[i] > 0.0;
    if (prev == cur) continue;
    const double r = root(static_cast<double>(i - 1) / (n - 1), static_cast<double>(i) / (n - 1));
    if (cur) {
      start = r;
    } else {
      segments_.push_back({start, r, mass});
      mass += antiderivative(r) - antiderivative(start);
      start = -1.0;
    }
  }
  if (start >= 0.0) {
    segments_.push_back({start, 1.0, mass});
    mass += antiderivative(1.0) - antiderivative(start);
  }
  positive_mass_ = mass;
  // Simpson across the clip kinks is only O(h^2); the exact segment mass is not.
  if (mass > 0.0) {
    grid_max_ *= z_ / mass;
    z_ = mass;
  }
}

namespace {

double series(const std::vector<double>& c, double u) {
  if (c.empty()) return 1.0;
  std::vector<double> leg(c.size());
  legendre_values(std::clamp(u, 0.0, 1.0), leg);
  double s = 1.0;
  for (std::size_t j = 0; j < leg.size(); ++j) s += c[j] * leg[j];
  return s;
}

}  // namespace

double UnitContrast::raw(double u) const { return series(coefficients_, u); }

double UnitContrast::value(double u) const { return std::max(0.0, raw(u)) / z_; }

double UnitContrast::antiderivative(double u) const {
  const double uu = std::clamp(u, 0.0, 1.0);
  if (coefficients_.empty()) return uu;
  std::vector<double> a(coefficients_.size());
  legendre_antiderivatives(uu, a);
  double s = uu;
  for (std::size_t j = 0; j < a.size(); ++j) s += coefficients_[j] * a[j];
  return s;
}

double UnitContrast::cdf(double u) const {
  if (!(u > 0.0)) return 0.0;
  if (!(u < 1.0)) return 1.0;
  if (segments_.empty()) return std::clamp(antiderivative(u), 0.0, 1.0);
  double mass = positive_mass_;
  for (const auto& s : segments_) {
    if (u < s.lo) {
      mass = s.before;
      break;
    }
    if (u <= s.hi) {
      mass = s.before + antiderivative(u) - antiderivative(s.lo);
      break;
    }
  }
  return std::clamp(mass / positive_mass_, 0.0, 1.0);
}

double contrast_density(const LPCoefficients& coeffs, double u) { return UnitContrast(coeffs.values).value(u); }

double contrast_density_raw(const LPCoefficients& coeffs, double u) { return series(coeffs.values, u); }

double qpivot(const LPCoefficients& coeffs) {
  double s = 0.0;
  for (double c : coeffs.values) s += c * c;
  return s;
}

std::vector<double> apply_threshold(std::vector<double> values, std::optional<double> threshold) {
  if (!threshold) return values;
  require(*threshold >= 0.0, ErrorCode::InvalidArgument, "coefficient threshold must be nonnegative");
  for (double& v : values)
    if (std::abs(v) < *threshold) v = 0.0;
  return values;
}

ContrastModel::ContrastModel(FeatureMap features, std::optional<LPBasis> response_basis, Pivot pivot,
                             std::vector<FittedLearner> learners, std::vector<double> training_y, LearnerSpec spec)
    : features_(std::move(features)),
      response_basis_(std::move(response_basis)),
      pivot_(std::move(pivot)),
      learners_(std::move(learners)),
      training_y_(std::move(training_y)),
      spec_(std::move(spec)) {}

std::vector<double> ContrastModel::response_scores(double y) const {
  std::vector<double> out(static_cast<std::size_t>(m_y()));
  if (response_basis_) {
    response_basis_->eval_all(y, out);
  } else {
    legendre_values(std::clamp(pivot_.cdf(y), 0.0, 1.0), out);
  }
  return out;
}

LPCoefficients ContrastModel::coefficients_at(std::span<const double> x, std::optional<double> threshold) const {
  const std::vector<double> row = features_.transform_row(x);
  LPCoefficients c;
  c.x.assign(x.begin(), x.end());
  c.values.resize(learners_.size());
  for (std::size_t j = 0; j < learners_.size(); ++j) c.values[j] = learners_[j].predict(row);
  c.values = apply_threshold(std::move(c.values), threshold);
  c.threshold = threshold;
  return c;
}

std::vector<LPCoefficients> ContrastModel::coefficients_at(const Matrix& x, std::optional<double> threshold,
                                                           Execution exec) const {
  const Matrix tx = features_.transform(x, exec);
  Matrix pred(x.rows(), static_cast<Eigen::Index>(learners_.size()));
  for (std::size_t j = 0; j < learners_.size(); ++j)
    pred.col(static_cast<Eigen::Index>(j)) = learners_[j].predict(tx, exec);
  std::vector<LPCoefficients> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    auto& c = out[static_cast<std::size_t>(i)];
    c.x.resize(static_cast<std::size_t>(x.cols()));
    for (Eigen::Index k = 0; k < x.cols(); ++k) c.x[static_cast<std::size_t>(k)] = x(i, k);
    c.values.resize(learners_.size());
    for (std::size_t j = 0; j < learners_.size(); ++j) c.values[j] = pred(i, static_cast<Eigen::Index>(j));
    c.values = apply_threshold(std::move(c.values), threshold);
    c.threshold = threshold;
  }
  return out;
}

ConditionalDensity ContrastModel::density_at(std::span<const double> x, std::optional<double> threshold) const {
  return ConditionalDensity(pivot_, coefficients_at(x, threshold));
}

ContrastModel fit_contrast(const Matrix& x, std::span<const double> y, const ContrastConfig& config) {
  require(x.rows() == static_cast<Eigen::Index>(y.size()), ErrorCode::DimensionMismatch,
          "covariate rows and response length differ");
  require(config.m_x >= 1 && config.m_y >= 1, ErrorCode::DegreeTooHigh, "degrees must be at least 1");
  require(static_cast<int>(y.size()) > std::max(config.m_x, config.m_y) + 1, ErrorCode::EmptySample,
          "too few observations for the requested degrees");
  config.learner.validate();

  FeatureMap features = build_feature_map(x, config.m_x, config.feature_names);
  const Matrix tx = features.transform(x, config.execution);

  std::optional<LPBasis> basis;
  Matrix ty;
  Pivot pivot;
  if (config.pivot) {
    pivot = *config.pivot;
    ty.resize(static_cast<Eigen::Index>(y.size()), config.m_y);
    std::vector<double> row(static_cast<std::size_t>(config.m_y));
    for (std::size_t i = 0; i < y.size(); ++i) {
      require(std::isfinite(y[i]), ErrorCode::DomainError, "non-finite response value");
      legendre_values(std::clamp(pivot.cdf(y[i]), 0.0, 1.0), row);
      for (int j = 0; j < config.m_y; ++j) ty(static_cast<Eigen::Index>(i), j) = row[static_cast<std::size_t>(j)];
    }
  } else {
    basis = LPBasis::build(y, config.m_y);
    ty = basis->values(y);
    pivot = Pivot::empirical_marginal(y);
  }

  std::vector<std::string> labels;
  for (const auto& l : features.labels()) labels.push_back(l.name);
  std::vector<FittedLearner> learners(static_cast<std::size_t>(ty.cols()));
  for_each_index(learners.size(), config.execution, [&](std::size_t j) {
    LearnerSpec spec = config.learner;
    spec.seed = derive_seed(config.learner.seed, j);
    learners[j] = fit(spec, tx, ty.col(static_cast<Eigen::Index>(j)), labels);
  });
  return ContrastModel(std::move(features), std::move(basis), std::move(pivot), std::move(learners),
                       std::vector<double>(y.begin(), y.end()), config.learner);
}

LPCoefficients coefficients_at(const ContrastModel& model, std::span<const double> x,
                               std::optional<double> threshold) {
  return model.coefficients_at(x, threshold);
}

}  // namespace upm
