#include "upm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "upm/density.hpp"
#include "upm/error.hpp"
#include "upm/lp_basis.hpp"

namespace upm {

namespace {

// R^2 of an OLS fit of t on [1 | design].
double r_squared(const Matrix& design, const Vector& t) {
  Matrix a(design.rows(), design.cols() + 1);
  a.col(0).setOnes();
  a.rightCols(design.cols()) = design;
  const Vector beta = a.colPivHouseholderQr().solve(t);
  const double rss = (t - a * beta).squaredNorm();
  const double tss = (t.array() - t.mean()).matrix().squaredNorm();
  if (!(tss > 0.0)) return 0.0;
  return std::clamp(1.0 - rss / tss, 0.0, 1.0);
}

}  // namespace

double hca_f_statistic(double r_squared, std::size_t n, int m) {
  if (r_squared >= 1.0) return std::numeric_limits<double>::infinity();
  return r_squared / (1.0 - r_squared) * (static_cast<double>(n) - m - 1.0) / m;
}

HCAReport hca(const Matrix& x, std::span<const double> y, int m_x, int max_j, double level, Execution exec) {
  require(x.rows() == static_cast<Eigen::Index>(y.size()), ErrorCode::DimensionMismatch,
          "covariate rows and response length differ");
  require(max_j >= 1, ErrorCode::DegreeTooHigh, "HCA needs at least one component");
  require(level > 0.0 && level < 1.0, ErrorCode::InvalidArgument, "significance level must lie in (0,1)");
  const FeatureMatrix tx = lp_feature_matrix(x, m_x, {}, exec);
  const int m = static_cast<int>(tx.values.cols());
  require(static_cast<Eigen::Index>(y.size()) > m + 2, ErrorCode::EmptySample,
          "HCA needs more observations than feature columns plus two");
  const LPBasis basis = LPBasis::build(y, max_j);
  const Matrix ty = basis.values(y);

  HCAReport report;
  report.m = m;
  report.n = y.size();
  report.level = level;
  for (const auto& l : tx.map.labels()) report.feature_labels.push_back(l.name);
  report.components.resize(static_cast<std::size_t>(ty.cols()));
  for_each_index(report.components.size(), exec, [&](std::size_t j) {
    HCAComponent& c = report.components[j];
    c.degree = static_cast<int>(j) + 1;
    c.r_squared = r_squared(tx.values, ty.col(static_cast<Eigen::Index>(j)));
    c.f_statistic = hca_f_statistic(c.r_squared, report.n, m);
    c.p_value = chi_squared_sf(m * c.f_statistic, m);
    c.significant = c.p_value < level;
  });
  return report;
}

std::vector<double> quantile_residuals(const ContrastModel& model, const Matrix& holdout_x,
                                       std::span<const double> holdout_y, Execution exec) {
  require(holdout_x.rows() == static_cast<Eigen::Index>(holdout_y.size()), ErrorCode::DimensionMismatch,
          "holdout rows and responses differ");
  require(!holdout_y.empty(), ErrorCode::EmptySample, "empty holdout set");
  const auto coeffs = model.coefficients_at(holdout_x, std::nullopt, exec);
  std::vector<double> u(holdout_y.size());
  for_each_index(u.size(), exec, [&](std::size_t i) {
    const ConditionalDensity cd(model.pivot(), coeffs[i]);
    u[i] = std::clamp(cd.cdf(holdout_y[i]), 0.0, 1.0);
  });
  return u;
}

QdivResult qdiv(std::span<const double> residuals, int m) {
  require(m >= 1, ErrorCode::DegreeTooHigh, "qDIV degree must be at least 1");
  require(residuals.size() >= static_cast<std::size_t>(m) + 2, ErrorCode::EmptySample,
          "qDIV needs at least m + 2 residuals");
  // Sorting first makes the statistic independent of input order bit for bit.
  std::vector<double> u(residuals.begin(), residuals.end());
  std::sort(u.begin(), u.end());
  std::vector<double> sums(static_cast<std::size_t>(m), 0.0);
  std::vector<double> leg(static_cast<std::size_t>(m));
  for (double v : u) {
    legendre_values(std::clamp(v, 0.0, 1.0), leg);
    for (int j = 0; j < m; ++j) sums[j] += leg[j];
  }
  QdivResult r;
  r.m = m;
  r.n = u.size();
  const double n = static_cast<double>(u.size());
  for (double s : sums) r.statistic += (s / n) * (s / n);
  r.p_value = chi_squared_sf(n * r.statistic, m);
  return r;
}

GofReport goodness_of_fit(const ContrastModel& model, const Matrix& holdout_x, std::span<const double> holdout_y,
                          int m, Execution exec) {
  GofReport g;
  g.residuals = quantile_residuals(model, holdout_x, holdout_y, exec);
  g.qdiv = qdiv(g.residuals, m);
  g.ks = ks_uniform(g.residuals);
  std::vector<double> sorted = g.residuals;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) g.qq.emplace_back((static_cast<double>(i) + 0.5) / n, sorted[i]);
  return g;
}

double contrast_entropy(const UnitContrast& d) {
  const int n = UnitContrast::kGridPoints;
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    const double di = d.value(static_cast<double>(i) / (n - 1));
    v[i] = di > 0.0 ? di * std::log(di) : 0.0;
  }
  // Simpson weights are positive and sum to one, so Jensen keeps this >= 0 up to rounding.
  return std::max(0.0, simpson_values(v, 0.0, 1.0));
}

double kl_to_uniform(const std::function<double(double)>& d, int points) {
  require(points >= 3 && points % 2 == 1, ErrorCode::InvalidArgument, "KL integration needs an odd grid");
  std::vector<double> v(static_cast<std::size_t>(points), 0.0);
  for (int i = 1; i < points - 1; ++i) {
    const double s = static_cast<double>(i) / (points - 1);
    const double u = s * s * (3.0 - 2.0 * s);
    const double di = d(u);
    if (di > 0.0) v[i] = di * std::log(di) * 6.0 * s * (1.0 - s);
  }
  return simpson_values(v, 0.0, 1.0);
}

double predictability_index(const ContrastModel& model, const Matrix& x_points, Execution exec) {
  require(x_points.rows() >= 1, ErrorCode::EmptySample, "predictability index needs query points");
  const auto coeffs = model.coefficients_at(x_points, std::nullopt, exec);
  std::vector<double> values(coeffs.size());
  for_each_index(coeffs.size(), exec, [&](std::size_t i) { values[i] = contrast_entropy(UnitContrast(coeffs[i].values)); });
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

}  // namespace upm
