#include "upm/classic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "upm/error.hpp"
#include "upm/numeric.hpp"

namespace upm {

namespace {

struct Groups {
  std::vector<int> labels;
  std::vector<std::size_t> index;  // group position per observation
  std::vector<std::size_t> sizes;
};

Groups index_groups(std::span<const double> y, std::span<const int> groups) {
  require(y.size() == groups.size(), ErrorCode::DimensionMismatch, "responses and group labels differ in length");
  require(!y.empty(), ErrorCode::EmptySample, "k-sample test of an empty sample");
  Groups g;
  g.labels.assign(groups.begin(), groups.end());
  std::sort(g.labels.begin(), g.labels.end());
  g.labels.erase(std::unique(g.labels.begin(), g.labels.end()), g.labels.end());
  require(g.labels.size() >= 2, ErrorCode::SingleGroup, "k-sample test needs at least two groups");
  g.sizes.assign(g.labels.size(), 0);
  for (int label : groups) {
    const auto pos = static_cast<std::size_t>(std::lower_bound(g.labels.begin(), g.labels.end(), label) - g.labels.begin());
    g.index.push_back(pos);
    ++g.sizes[pos];
  }
  return g;
}

// Ranks 1..N of a tie-free sample.
std::vector<double> tie_free_ranks(std::span<const double> y) {
  std::vector<std::size_t> order(y.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });
  std::vector<double> rank(y.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (r > 0) require(y[order[r]] != y[order[r - 1]], ErrorCode::DomainError, "direct rank formulas need tie-free data");
    rank[order[r]] = static_cast<double>(r) + 1.0;
  }
  return rank;
}

// sum_l n_l * (group mean of g(R))^2 for a centered rank score g.
template <class Score>
double weighted_square_of_means(std::span<const double> y, std::span<const int> groups, Score score) {
  const Groups g = index_groups(y, groups);
  const std::vector<double> rank = tie_free_ranks(y);
  std::vector<double> sums(g.labels.size(), 0.0);
  for (std::size_t i = 0; i < y.size(); ++i) sums[g.index[i]] += score(rank[i]);
  double s = 0.0;
  for (std::size_t l = 0; l < sums.size(); ++l) {
    const double mean_l = sums[l] / static_cast<double>(g.sizes[l]);
    s += static_cast<double>(g.sizes[l]) * mean_l * mean_l;
  }
  return s;
}

const char* order_name(int j) {
  switch (j) {
    case 1:
      return "KW";
    case 2:
      return "MOOD";
    case 3:
      return "SKEW";
    case 4:
      return "KURT";
  }
  return "?";
}

}  // namespace

double kruskal_wallis_direct(std::span<const double> y, std::span<const int> groups) {
  const double n = static_cast<double>(y.size());
  const double c = (n + 1.0) / 2.0;
  return 12.0 / (n * (n + 1.0)) * weighted_square_of_means(y, groups, [c](double r) { return r - c; });
}

double mood_direct(std::span<const double> y, std::span<const int> groups) {
  const double n = static_cast<double>(y.size());
  const double c = (n + 1.0) / 2.0;
  const double centre = (n * n - 1.0) / 12.0;
  return 180.0 / (n * (n + 1.0) * (n * n - 4.0)) *
         weighted_square_of_means(y, groups, [=](double r) { return (r - c) * (r - c) - centre; });
}

double skew_direct(std::span<const double> y, std::span<const int> groups) {
  const double n = static_cast<double>(y.size());
  const double c = (n + 1.0) / 2.0;
  const double lin = 3.0 * n * n - 7.0;
  return 7.0 / (n * (n + 1.0) * (n * n - 4.0) * (n * n - 9.0)) *
         weighted_square_of_means(y, groups, [=](double r) {
           const double d = r - c;
           return 20.0 * d * d * d - lin * d;
         });
}

KSampleReport ksample(std::span<const double> y, std::span<const int> groups, const std::vector<int>& orders) {
  const Groups g = index_groups(y, groups);
  require(!orders.empty(), ErrorCode::InvalidArgument, "no k-sample orders requested");
  for (int j : orders) require(j >= 1 && j <= 4, ErrorCode::InvalidArgument, "k-sample orders must lie in 1..4");
  const int wanted = *std::max_element(orders.begin(), orders.end());

  std::vector<double> uniq(y.begin(), y.end());
  std::sort(uniq.begin(), uniq.end());
  const auto distinct = static_cast<int>(std::unique(uniq.begin(), uniq.end()) - uniq.begin());
  require(distinct >= 2, ErrorCode::ConstantColumn, "k-sample test of a constant response");
  const LPBasis basis = LPBasis::build(y, std::min(wanted, distinct - 1));
  const Matrix t = basis.values(y);

  KSampleReport r;
  r.labels = g.labels;
  r.group_sizes = g.sizes;
  r.n = y.size();
  r.ties = distinct < static_cast<int>(y.size());
  r.dof = static_cast<int>(g.labels.size()) - 1;
  const auto k = static_cast<Eigen::Index>(g.labels.size());
  const auto n = static_cast<Eigen::Index>(y.size());

  Matrix sums = Matrix::Zero(k, t.cols());
  for (Eigen::Index i = 0; i < n; ++i) sums.row(static_cast<Eigen::Index>(g.index[i])) += t.row(i);
  r.group_means.resize(g.labels.size());
  for (Eigen::Index l = 0; l < k; ++l) {
    for (Eigen::Index j = 0; j < t.cols(); ++j)
      r.group_means[l].push_back(sums(l, j) / static_cast<double>(g.sizes[l]));
  }

  // Group-indicator design for the independent N R^2 route.
  Matrix design = Matrix::Zero(n, k);
  for (Eigen::Index i = 0; i < n; ++i) design(i, static_cast<Eigen::Index>(g.index[i])) = 1.0;
  const Eigen::ColPivHouseholderQR<Matrix> qr(design);

  std::vector<int> sorted_orders = orders;
  std::sort(sorted_orders.begin(), sorted_orders.end());
  sorted_orders.erase(std::unique(sorted_orders.begin(), sorted_orders.end()), sorted_orders.end());
  for (int j : sorted_orders) {
    KSampleOrder o;
    o.order = j;
    o.name = order_name(j);
    if (j > t.cols()) {
      o.available = false;
      o.lp_value = std::numeric_limits<double>::quiet_NaN();
      o.n_r_squared = std::numeric_limits<double>::quiet_NaN();
      o.p_value = std::numeric_limits<double>::quiet_NaN();
      r.orders.push_back(o);
      continue;
    }
    double lp = 0.0;
    for (Eigen::Index l = 0; l < k; ++l) {
      const double m = r.group_means[l][j - 1];
      lp += static_cast<double>(g.sizes[l]) * m * m;
    }
    o.lp_value = lp;
    const Vector tj = t.col(j - 1);
    const Vector fitted = design * qr.solve(tj);
    const double tss = (tj.array() - tj.mean()).matrix().squaredNorm();
    const double rss = (tj - fitted).squaredNorm();
    o.n_r_squared = tss > 0.0 ? static_cast<double>(n) * (1.0 - rss / tss) : 0.0;
    o.p_value = chi_squared_sf(lp, r.dof);
    if (!r.ties) {
      if (j == 1) o.direct = kruskal_wallis_direct(y, groups);
      if (j == 2 && n > 2) o.direct = mood_direct(y, groups);
      if (j == 3 && n > 3) o.direct = skew_direct(y, groups);
    }
    r.orders.push_back(o);
  }
  return r;
}

double PimModel::lp1(std::span<const double> x) const {
  const std::vector<double> row = features.transform_row(x);
  double v = fit.intercept;
  for (std::size_t j = 0; j < row.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    if (fit.coefficients[jj] != 0.0) v += fit.coefficients[jj] * (row[j] - fit.center[jj]) / fit.scale[jj];
  }
  return v;
}

double PimModel::cpr(std::span<const double> x) const {
  const double bound = std::sqrt(3.0);
  return std::clamp(lp1(x), -bound, bound) / std::sqrt(12.0) + 0.5;
}

std::vector<std::string> PimModel::selected() const {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < features.labels().size(); ++j)
    if (fit.coefficients[static_cast<Eigen::Index>(j)] != 0.0) out.push_back(features.labels()[j].name);
  return out;
}

PimModel pim(const Matrix& x, std::span<const double> y, int m_x) {
  require(x.rows() == static_cast<Eigen::Index>(y.size()), ErrorCode::DimensionMismatch,
          "covariate rows and response length differ");
  PimModel model;
  model.features = build_feature_map(x, m_x);
  const Matrix tx = model.features.transform(x);
  require(x.rows() > static_cast<Eigen::Index>(tx.cols()) + 2, ErrorCode::EmptySample,
          "PIM needs more observations than feature columns plus two");
  const LPBasis basis = LPBasis::build(y, 1);
  const Matrix t1 = basis.values(y);
  model.fit = fit_lasso_bic(tx, t1.col(0));
  return model;
}

ContrastConfig dif_default_config() {
  ContrastConfig c;
  c.learner = LearnerSpec::gbm();
  return c;
}

DIFReport dif(const Matrix& x, std::span<const double> z, std::span<const double> y, const Matrix& queries,
              const ContrastConfig& config) {
  require(x.rows() == static_cast<Eigen::Index>(z.size()) && z.size() == y.size(), ErrorCode::DimensionMismatch,
          "covariates, treatment and response differ in length");
  require(queries.cols() == x.cols(), ErrorCode::DimensionMismatch, "query rows need one value per covariate");
  std::size_t treated = 0;
  for (double v : z) {
    require(v == 0.0 || v == 1.0, ErrorCode::InvalidArgument, "treatment indicator must be 0 or 1");
    if (v == 1.0) ++treated;
  }
  require(treated > 0 && treated < z.size(), ErrorCode::DegenerateArm, "both treatment arms must be nonempty");

  Matrix xz(x.rows(), x.cols() + 1);
  xz.leftCols(x.cols()) = x;
  for (Eigen::Index i = 0; i < x.rows(); ++i) xz(i, x.cols()) = z[static_cast<std::size_t>(i)];
  ContrastConfig cfg = config;
  if (!cfg.feature_names.empty()) cfg.feature_names.push_back("z");
  const ContrastModel model = fit_contrast(xz, y, cfg);

  DIFReport report;
  report.m_y = model.m_y();
  Matrix arms(2 * queries.rows(), x.cols() + 1);
  for (Eigen::Index q = 0; q < queries.rows(); ++q) {
    arms.row(2 * q).head(x.cols()) = queries.row(q);
    arms(2 * q, x.cols()) = 0.0;
    arms.row(2 * q + 1).head(x.cols()) = queries.row(q);
    arms(2 * q + 1, x.cols()) = 1.0;
  }
  const auto coeffs = model.coefficients_at(arms, std::nullopt, config.execution);
  for (Eigen::Index q = 0; q < queries.rows(); ++q) {
    DIFPoint p;
    p.x.assign(coeffs[2 * q].x.begin(), coeffs[2 * q].x.end() - 1);
    p.control = coeffs[2 * q].values;
    p.treated = coeffs[2 * q + 1].values;
    for (std::size_t j = 0; j < p.control.size(); ++j) {
      const double d = p.control[j] - p.treated[j];
      p.components.push_back(d * d);
      p.value += d * d;
    }
    report.points.push_back(std::move(p));
  }
  return report;
}

}  // namespace upm
