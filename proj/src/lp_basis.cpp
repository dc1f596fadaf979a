#include "upm/lp_basis.hpp"

#include <algorithm>
#include <cmath>

#include "upm/error.hpp"

namespace upm {

namespace {

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t c = 1;
  for (int i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
  return c;
}

// Unnormalized Legendre P_0..P_{m} at x in [-1,1].
void legendre_p(double x, int m, std::span<double> p) {
  p[0] = 1.0;
  if (m >= 1) p[1] = x;
  for (int n = 1; n < m; ++n) p[n + 1] = ((2.0 * n + 1.0) * x * p[n] - n * p[n - 1]) / (n + 1.0);
}

}  // namespace

LegendreBasis::LegendreBasis(int max_degree) : max_degree_(max_degree) {
  require(max_degree >= 0, ErrorCode::DegreeOutOfRange, "Legendre degree must be nonnegative");
  const int exact = std::min(max_degree, kMaxExactDegree);
  coefficients_.resize(static_cast<std::size_t>(exact) + 1);
  for (int j = 0; j <= exact; ++j) {
    auto& row = coefficients_[static_cast<std::size_t>(j)];
    row.resize(static_cast<std::size_t>(j) + 1);
    for (int k = 0; k <= j; ++k) {
      const std::int64_t mag = binomial(j, k) * binomial(j + k, k);
      row[static_cast<std::size_t>(k)] = ((j + k) % 2 == 0) ? mag : -mag;
    }
  }
}

double LegendreBasis::value(int j, double u) const {
  require(j >= 0 && j <= max_degree_, ErrorCode::DegreeOutOfRange, "Legendre degree out of range");
  return eval_legendre(j, u);
}

double LegendreBasis::antiderivative(int j, double u) const {
  require(j >= 0 && j <= max_degree_, ErrorCode::DegreeOutOfRange, "Legendre degree out of range");
  return legendre_antiderivative(j, u);
}

std::span<const std::int64_t> LegendreBasis::integer_coefficients(int j) const {
  require(j >= 0 && j < static_cast<int>(coefficients_.size()), ErrorCode::DegreeOutOfRange,
          "no exact coefficients stored for this degree");
  return coefficients_[static_cast<std::size_t>(j)];
}

double LegendreBasis::normalizer(int j) { return std::sqrt(2.0 * j + 1.0); }

double eval_legendre(int j, double u) {
  require(j >= 0, ErrorCode::DegreeOutOfRange, "Legendre degree must be nonnegative");
  require(u >= 0.0 && u <= 1.0, ErrorCode::DomainError, "Legendre argument must lie in [0,1]");
  std::vector<double> p(static_cast<std::size_t>(j) + 1);
  legendre_p(2.0 * u - 1.0, j, p);
  return std::sqrt(2.0 * j + 1.0) * p[static_cast<std::size_t>(j)];
}

double legendre_antiderivative(int j, double u) {
  require(j >= 0, ErrorCode::DegreeOutOfRange, "Legendre degree must be nonnegative");
  require(u >= 0.0 && u <= 1.0, ErrorCode::DomainError, "Legendre argument must lie in [0,1]");
  if (j == 0) return u;
  std::vector<double> p(static_cast<std::size_t>(j) + 2);
  legendre_p(2.0 * u - 1.0, j + 1, p);
  return (p[static_cast<std::size_t>(j) + 1] - p[static_cast<std::size_t>(j) - 1]) /
         (2.0 * std::sqrt(2.0 * j + 1.0));
}

void legendre_values(double u, std::span<double> out) {
  const int m = static_cast<int>(out.size());
  if (m == 0) return;
  const double x = 2.0 * u - 1.0;
  double prev = 1.0;
  double cur = x;
  out[0] = std::sqrt(3.0) * cur;
  for (int n = 1; n < m; ++n) {
    const double next = ((2.0 * n + 1.0) * x * cur - n * prev) / (n + 1.0);
    prev = cur;
    cur = next;
    out[static_cast<std::size_t>(n)] = std::sqrt(2.0 * (n + 1) + 1.0) * cur;
  }
}

void legendre_antiderivatives(double u, std::span<double> out) {
  const int m = static_cast<int>(out.size());
  if (m == 0) return;
  std::vector<double> p(static_cast<std::size_t>(m) + 2);
  legendre_p(2.0 * u - 1.0, m + 1, p);
  for (int j = 1; j <= m; ++j) {
    out[static_cast<std::size_t>(j) - 1] =
        (p[static_cast<std::size_t>(j) + 1] - p[static_cast<std::size_t>(j) - 1]) /
        (2.0 * std::sqrt(2.0 * j + 1.0));
  }
}

LPBasis LPBasis::build(std::span<const double> sample, int degree) {
  require(!sample.empty(), ErrorCode::EmptySample, "LP basis of an empty sample");
  require(degree >= 1, ErrorCode::DegreeTooHigh, "LP basis degree must be at least 1");
  for (double v : sample) require(std::isfinite(v), ErrorCode::DomainError, "non-finite sample value");

  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());

  LPBasis b;
  b.sample_size_ = sorted.size();
  b.requested_degree_ = degree;
  std::vector<std::size_t> counts;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    b.distinct_.push_back(sorted[i]);
    counts.push_back(j - i);
    i = j;
  }
  const std::size_t k_count = b.distinct_.size();
  require(static_cast<std::size_t>(degree) < k_count, ErrorCode::DegreeTooHigh,
          "degree " + std::to_string(degree) + " needs more than " + std::to_string(k_count) +
              " distinct values");

  const double n = static_cast<double>(b.sample_size_);
  b.pmf_.resize(k_count);
  b.mid_.resize(k_count);
  double cumulative = 0.0;
  double cube_sum = 0.0;
  std::size_t running = 0;
  for (std::size_t k = 0; k < k_count; ++k) {
    running += counts[k];
    cumulative = static_cast<double>(running) / n;
    b.pmf_[k] = static_cast<double>(counts[k]) / n;
    b.mid_[k] = cumulative - 0.5 * b.pmf_[k];
    cube_sum += b.pmf_[k] * b.pmf_[k] * b.pmf_[k];
  }

  const auto weighted_dot = [&](const Vector& a, const Vector& c) {
    double s = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) s += b.pmf_[k] * a[static_cast<Eigen::Index>(k)] * c[static_cast<Eigen::Index>(k)];
    return s;
  };

  const auto kk = static_cast<Eigen::Index>(k_count);
  Vector t1(kk);
  const double scale = std::sqrt(12.0) / std::sqrt(1.0 - cube_sum);
  for (Eigen::Index k = 0; k < kk; ++k) t1[k] = scale * (b.mid_[static_cast<std::size_t>(k)] - 0.5);

  // Orthonormal system so far, as values and as coefficients in powers of T_1.
  std::vector<Vector> values{Vector::Ones(kk), t1};
  std::vector<Vector> coefs;
  coefs.push_back(Vector::Unit(degree + 1, 0));
  coefs.push_back(Vector::Unit(degree + 1, 1));

  for (int power = 2; power <= degree; ++power) {
    Vector v = t1.array().pow(power).matrix();
    Vector c = Vector::Unit(degree + 1, power);
    const double original = std::sqrt(weighted_dot(v, v));
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t q = 0; q < values.size(); ++q) {
        const double proj = weighted_dot(v, values[q]);
        v -= proj * values[q];
        c -= proj * coefs[q];
      }
    }
    const double norm = std::sqrt(weighted_dot(v, v));
    if (!(norm > 1e-10 * original)) break;
    values.push_back(v / norm);
    coefs.push_back(c / norm);
  }

  const auto m = static_cast<Eigen::Index>(values.size() - 1);
  b.table_.resize(kk, m);
  b.power_coefficients_.resize(m, degree + 1);
  for (Eigen::Index j = 0; j < m; ++j) {
    b.table_.col(j) = values[static_cast<std::size_t>(j) + 1];
    b.power_coefficients_.row(j) = coefs[static_cast<std::size_t>(j) + 1].transpose();
  }
  return b;
}

LPBasis LPBasis::from_parts(std::vector<double> distinct, std::vector<double> pmf, std::vector<double> mid,
                            Matrix table, Matrix power_coefficients, std::size_t sample_size,
                            int requested_degree) {
  require(!distinct.empty() && distinct.size() == pmf.size() && distinct.size() == mid.size() &&
              table.rows() == static_cast<Eigen::Index>(distinct.size()),
          ErrorCode::DimensionMismatch, "inconsistent LP basis parts");
  LPBasis b;
  b.distinct_ = std::move(distinct);
  b.pmf_ = std::move(pmf);
  b.mid_ = std::move(mid);
  b.table_ = std::move(table);
  b.power_coefficients_ = std::move(power_coefficients);
  b.sample_size_ = sample_size;
  b.requested_degree_ = requested_degree;
  return b;
}

std::size_t LPBasis::locate(double z) const noexcept {
  const auto it = std::upper_bound(distinct_.begin(), distinct_.end(), z);
  if (it == distinct_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(distinct_.begin(), it)) - 1;
}

double LPBasis::eval(double z, int j) const {
  require(j >= 1 && j <= degree(), ErrorCode::DegreeOutOfRange,
          "LP degree " + std::to_string(j) + " outside 1.." + std::to_string(degree()));
  return table_(static_cast<Eigen::Index>(locate(z)), j - 1);
}

void LPBasis::eval_all(double z, std::span<double> out) const {
  const auto row = static_cast<Eigen::Index>(locate(z));
  const std::size_t m = std::min(out.size(), static_cast<std::size_t>(degree()));
  for (std::size_t j = 0; j < m; ++j) out[j] = table_(row, static_cast<Eigen::Index>(j));
}

Matrix LPBasis::values(std::span<const double> points) const {
  Matrix out(static_cast<Eigen::Index>(points.size()), degree());
  for (std::size_t i = 0; i < points.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = table_.row(static_cast<Eigen::Index>(locate(points[i])));
  }
  return out;
}

LPBasis build_lp_basis(std::span<const double> sample, int degree) { return LPBasis::build(sample, degree); }

double eval_lp_basis(const LPBasis& basis, double z, int j) { return basis.eval(z, j); }

FeatureMap::FeatureMap(std::size_t input_dim, std::vector<std::size_t> columns, std::vector<LPBasis> bases,
                       std::vector<std::string> names)
    : input_dim_(input_dim), columns_(std::move(columns)), bases_(std::move(bases)), names_(std::move(names)) {
  require(columns_.size() == bases_.size(), ErrorCode::DimensionMismatch, "one basis per retained column");
  if (names_.size() != input_dim_) {
    names_.clear();
    for (std::size_t c = 0; c < input_dim_; ++c) names_.push_back("x" + std::to_string(c + 1));
  }
  std::vector<bool> kept(input_dim_, false);
  for (std::size_t q = 0; q < columns_.size(); ++q) {
    kept[columns_[q]] = true;
    for (int j = 1; j <= bases_[q].degree(); ++j) {
      labels_.push_back({columns_[q], j, "T" + std::to_string(j) + "(" + names_[columns_[q]] + ")"});
    }
  }
  for (std::size_t c = 0; c < input_dim_; ++c) {
    if (!kept[c]) skipped_.push_back(c);
  }
}

void FeatureMap::transform_row(std::span<const double> x, std::span<double> out) const {
  require(x.size() == input_dim_, ErrorCode::DimensionMismatch,
          "expected " + std::to_string(input_dim_) + " covariates, got " + std::to_string(x.size()));
  require(out.size() == output_dim(), ErrorCode::DimensionMismatch, "feature output size mismatch");
  std::size_t offset = 0;
  for (std::size_t q = 0; q < bases_.size(); ++q) {
    const auto m = static_cast<std::size_t>(bases_[q].degree());
    bases_[q].eval_all(x[columns_[q]], out.subspan(offset, m));
    offset += m;
  }
}

std::vector<double> FeatureMap::transform_row(std::span<const double> x) const {
  std::vector<double> out(output_dim());
  transform_row(x, out);
  return out;
}

Matrix FeatureMap::transform(const Matrix& x, Execution exec) const {
  require(static_cast<std::size_t>(x.cols()) == input_dim_, ErrorCode::DimensionMismatch,
          "covariate matrix has the wrong number of columns");
  Matrix out(x.rows(), static_cast<Eigen::Index>(output_dim()));
  for_each_index(bases_.size(), exec, [&](std::size_t q) {
    Eigen::Index offset = 0;
    for (std::size_t r = 0; r < q; ++r) offset += bases_[r].degree();
    const auto& basis = bases_[q];
    const auto col = static_cast<Eigen::Index>(columns_[q]);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      out.row(i).segment(offset, basis.degree()) = basis.table().row(static_cast<Eigen::Index>(basis.locate(x(i, col))));
    }
  });
  return out;
}

FeatureMap build_feature_map(const Matrix& data, int max_degree, const std::vector<std::string>& names) {
  require(data.rows() >= 1 && data.cols() >= 1, ErrorCode::EmptySample, "empty covariate matrix");
  require(max_degree >= 1, ErrorCode::DegreeTooHigh, "feature degree must be at least 1");
  std::vector<std::size_t> columns;
  std::vector<LPBasis> bases;
  for (Eigen::Index c = 0; c < data.cols(); ++c) {
    std::vector<double> col(data.col(c).data(), data.col(c).data() + data.rows());
    std::vector<double> uniq = col;
    std::sort(uniq.begin(), uniq.end());
    const auto distinct = static_cast<int>(std::unique(uniq.begin(), uniq.end()) - uniq.begin());
    if (distinct < 2) continue;
    columns.push_back(static_cast<std::size_t>(c));
    bases.push_back(LPBasis::build(col, std::min(max_degree, distinct - 1)));
  }
  require(!columns.empty(), ErrorCode::ConstantColumn, "every covariate column is constant");
  return FeatureMap(static_cast<std::size_t>(data.cols()), std::move(columns), std::move(bases), names);
}

FeatureMatrix lp_feature_matrix(const Matrix& data, int max_degree, const std::vector<std::string>& names,
                                Execution exec) {
  FeatureMatrix fm;
  fm.map = build_feature_map(data, max_degree, names);
  fm.values = fm.map.transform(data, exec);
  return fm;
}

}  // namespace upm
