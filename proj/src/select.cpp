#include "upm/select.hpp"

#include <algorithm>
#include <numeric>

#include "upm/error.hpp"
#include "upm/lp_basis.hpp"

namespace upm {

std::vector<std::size_t> OvisReport::ranking() const {
  std::vector<std::size_t> idx(features.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return features[a].score > features[b].score; });
  return idx;
}

OvisReport shape_predictors(const Matrix& x, std::span<const double> y, const OvisOptions& options) {
  require(x.rows() == static_cast<Eigen::Index>(y.size()), ErrorCode::DimensionMismatch,
          "covariate rows and response length differ");
  require(y.size() > 10, ErrorCode::EmptySample, "shape predictors need more than 10 observations");
  require(!options.orders.empty(), ErrorCode::InvalidArgument, "no orders requested");
  for (int j : options.orders)
    require(j >= 1 && j <= 6, ErrorCode::InvalidArgument, "shape-predictor orders must lie in 1..6");
  require(!options.lambda || *options.lambda >= 0.0, ErrorCode::InvalidArgument, "lambda must be >= 0");

  const auto p = static_cast<std::size_t>(x.cols());
  std::vector<std::string> names = options.feature_names;
  if (names.size() != p) {
    names.clear();
    for (std::size_t c = 0; c < p; ++c) names.push_back("x" + std::to_string(c + 1));
  }

  // Design columns and the (feature, degree) each one represents.
  Matrix design;
  std::vector<std::pair<std::size_t, int>> roles;
  int max_degree = 1;
  if (options.robust) {
    const FeatureMap map = build_feature_map(x, options.m_x, names);
    design = map.transform(x, options.execution);
    for (const auto& l : map.labels()) roles.emplace_back(l.variable, l.degree);
    max_degree = options.m_x;
  } else {
    design = x;
    for (std::size_t c = 0; c < p; ++c) roles.emplace_back(c, 1);
  }

  const int top = *std::max_element(options.orders.begin(), options.orders.end());
  const LPBasis basis = LPBasis::build(y, top);
  require(basis.degree() >= top, ErrorCode::DegreeTooHigh, "response has too few distinct values for the orders");
  const Matrix ty = basis.values(y);

  OvisReport report;
  report.orders = options.orders;
  const std::size_t orders = options.orders.size();
  report.coefficients.assign(orders, std::vector<std::vector<double>>(p, std::vector<double>(max_degree, 0.0)));
  report.selected.resize(orders);
  report.lambdas.resize(orders);
  for_each_index(orders, options.execution, [&](std::size_t o) {
    const Vector target = ty.col(options.orders[o] - 1);
    const LinearState fit = options.lambda ? fit_lasso(design, target, *options.lambda)
                                           : fit_lasso_bic(design, target);
    report.lambdas[o] = fit.lambda;
    for (std::size_t c = 0; c < roles.size(); ++c)
      report.coefficients[o][roles[c].first][roles[c].second - 1] = fit.coefficients[static_cast<Eigen::Index>(c)];
    for (std::size_t l = 0; l < p; ++l) {
      const auto& row = report.coefficients[o][l];
      if (std::any_of(row.begin(), row.end(), [](double b) { return b != 0.0; })) report.selected[o].push_back(l);
    }
  });

  report.features.resize(p);
  for (std::size_t l = 0; l < p; ++l) {
    OvisFeature& f = report.features[l];
    f.name = names[l];
    for (std::size_t o = 0; o < orders; ++o) {
      double s = 0.0;
      for (double b : report.coefficients[o][l]) s += b * b;
      f.per_order.push_back(s);
      f.score += s;
    }
  }
  return report;
}

}  // namespace upm
