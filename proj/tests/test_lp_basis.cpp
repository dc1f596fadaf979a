#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "upm/error.hpp"
#include "upm/lp_basis.hpp"

using namespace upm;

namespace {

std::vector<double> normal_sample(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

std::vector<double> tied_sample(std::size_t n, int levels, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> d(0, levels - 1);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

double max_gram_error(const LPBasis& b, const std::vector<double>& z) {
  const Matrix t = b.values(z);
  const double n = static_cast<double>(z.size());
  const Matrix g = t.transpose() * t / n;
  double err = (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < t.cols(); ++j) err = std::max(err, std::abs(t.col(j).mean()));
  return err;
}

}  // namespace

TEST(LegendreTest, ClosedFormValues) {
  EXPECT_NEAR(eval_legendre(1, 0.5), 0.0, 1e-15);
  EXPECT_NEAR(eval_legendre(2, 0.5), -std::sqrt(5.0) / 2.0, 1e-14);
  EXPECT_NEAR(eval_legendre(3, 0.0), -std::sqrt(7.0), 1e-14);
  for (double u : {0.0, 0.13, 0.5, 0.77, 1.0}) {
    EXPECT_NEAR(eval_legendre(1, u), std::sqrt(12.0) * (u - 0.5), 1e-14);
    EXPECT_NEAR(eval_legendre(2, u), std::sqrt(5.0) * (6 * u * u - 6 * u + 1), 1e-13);
    EXPECT_NEAR(eval_legendre(3, u), std::sqrt(7.0) * (20 * u * u * u - 30 * u * u + 12 * u - 1), 1e-13);
  }
}

TEST(LegendreTest, RecurrenceMatchesBinomialSum) {
  for (int j = 0; j <= 14; ++j)
    for (double u = 0.0; u <= 1.0; u += 0.0625) EXPECT_NEAR(eval_legendre(j, u), oracle::legendre(j, u), 1e-8) << j;
}

TEST(LegendreTest, IntegerCoefficientsAreOrthonormal) {
  using boost::multiprecision::cpp_rational;
  const LegendreBasis basis(10);
  for (int j = 0; j <= 10; ++j) {
    for (int k = 0; k <= j; ++k) {
      const auto a = basis.integer_coefficients(j);
      const auto b = basis.integer_coefficients(k);
      cpp_rational s = 0;
      for (std::size_t p = 0; p < a.size(); ++p)
        for (std::size_t q = 0; q < b.size(); ++q)
          s += cpp_rational(a[p]) * cpp_rational(b[q]) / cpp_rational(static_cast<long long>(p + q + 1));
      // Exact: zero off the diagonal and 1/(2j+1) on it.
      if (j == k)
        EXPECT_EQ(s, cpp_rational(1, 2 * j + 1)) << j;
      else
        EXPECT_EQ(s, 0) << j << "," << k;
      const double v = static_cast<double>(s) * LegendreBasis::normalizer(j) * LegendreBasis::normalizer(k);
      EXPECT_NEAR(v, j == k ? 1.0 : 0.0, 1e-10) << j << "," << k;
    }
  }
}

TEST(LegendreTest, ExactCoefficientsReproduceValues) {
  const LegendreBasis basis(LegendreBasis::kMaxExactDegree);
  for (int j = 1; j <= 12; ++j) {
    const auto c = basis.integer_coefficients(j);
    for (double u : {0.1, 0.4, 0.9}) {
      long double s = 0.0L;
      long double p = 1.0L;
      for (auto v : c) {
        s += static_cast<long double>(v) * p;
        p *= u;
      }
      EXPECT_NEAR(static_cast<double>(s) * LegendreBasis::normalizer(j), basis.value(j, u), 1e-8);
    }
  }
}

TEST(LegendreTest, AntiderivativeVanishesAtEndsAndDifferentiates) {
  for (int j = 1; j <= 10; ++j) {
    EXPECT_NEAR(legendre_antiderivative(j, 0.0), 0.0, 1e-14);
    EXPECT_NEAR(legendre_antiderivative(j, 1.0), 0.0, 1e-13);
    for (double u : {0.2, 0.5, 0.8}) {
      const double h = 1e-6;
      const double d = (legendre_antiderivative(j, u + h) - legendre_antiderivative(j, u - h)) / (2 * h);
      EXPECT_NEAR(d, eval_legendre(j, u), 1e-6);
      EXPECT_NEAR(legendre_antiderivative(j, u), oracle::trapezoid([j](double v) { return oracle::legendre(j, v); }, 0.0, u, 20001),
                  1e-7);
    }
  }
}

TEST(LegendreTest, DomainChecked) {
  EXPECT_THROW(eval_legendre(1, -0.01), Error);
  EXPECT_THROW(eval_legendre(2, 1.01), Error);
  try {
    eval_legendre(1, 2.0);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DomainError);
  }
}

TEST(LPBasisTest, FirstScoreOfTieFreeSample) {
  const std::vector<double> z{1, 2, 3, 4, 5};
  const LPBasis b = LPBasis::build(z, 1);
  const double expected[] = {-1.4142135623730951, -0.7071067811865476, 0.0, 0.7071067811865476, 1.4142135623730951};
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(b.eval(z[i], 1), expected[i], 1e-12);
  // sqrt(12/(N^2-1)) (R - (N+1)/2)
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(b.eval(z[i], 1), std::sqrt(12.0 / 24.0) * (i + 1 - 3.0), 1e-12);
}

TEST(LPBasisTest, FirstScoreOfBinarySample) {
  const LPBasis b = LPBasis::build(std::vector<double>{0, 0, 1, 1}, 1);
  EXPECT_NEAR(b.eval(0.0, 1), -1.0, 1e-12);
  EXPECT_NEAR(b.eval(1.0, 1), 1.0, 1e-12);
}

TEST(LPBasisTest, FirstScoreMatchesCountingOracle) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto z = tied_sample(60, 7, seed);
    const LPBasis b = LPBasis::build(z, 3);
    const auto t = oracle::first_score(z);
    for (std::size_t i = 0; i < z.size(); ++i) EXPECT_NEAR(b.eval(z[i], 1), t[i], 1e-12);
  }
}

TEST(LPBasisTest, EmpiricalOrthonormality) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    for (std::size_t n : {20u, 200u, 2000u}) {
      const auto cont = normal_sample(n, seed);
      EXPECT_LT(max_gram_error(LPBasis::build(cont, 6), cont), 1e-8);
      const auto tied = tied_sample(n, 9, seed);
      EXPECT_LT(max_gram_error(LPBasis::build(tied, 6), tied), 1e-8);
    }
  }
}

TEST(LPBasisTest, DegreeLimits) {
  const std::vector<double> z{1, 1, 2, 3};
  EXPECT_NO_THROW(LPBasis::build(z, 2));
  try {
    LPBasis::build(z, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegreeTooHigh);
  }
  try {
    LPBasis::build(std::vector<double>{}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptySample);
  }
  const LPBasis b = LPBasis::build(z, 2);
  try {
    b.eval(1.0, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegreeOutOfRange);
  }
  EXPECT_THROW(b.eval(1.0, 0), Error);
}

TEST(LPBasisTest, StepEvaluationAndClamping) {
  const auto z = normal_sample(50, 3);
  const LPBasis b = LPBasis::build(z, 4);
  const auto v = b.distinct_values();
  for (int j = 1; j <= 4; ++j) {
    for (std::size_t k = 0; k < v.size(); ++k) EXPECT_EQ(b.eval(v[k], j), b.table()(static_cast<Eigen::Index>(k), j - 1));
    EXPECT_EQ(b.eval(v.front() - 10.0, j), b.table()(0, j - 1));
    EXPECT_EQ(b.eval(v.back() + 10.0, j), b.table()(b.table().rows() - 1, j - 1));
    for (std::size_t k = 0; k + 1 < v.size(); ++k)
      EXPECT_EQ(b.eval(0.5 * (v[k] + v[k + 1]), j), b.table()(static_cast<Eigen::Index>(k), j - 1));
  }
}

TEST(LPBasisTest, MedianOfTieFreeSampleScoresZero) {
  const auto z = normal_sample(101, 4);
  std::vector<double> s = z;
  std::sort(s.begin(), s.end());
  EXPECT_NEAR(LPBasis::build(z, 2).eval(s[50], 1), 0.0, 1e-12);
}

TEST(LPBasisTest, RankInvariance) {
  const auto z = normal_sample(300, 5);
  std::vector<double> g;
  for (double v : z) g.push_back(std::exp(v) + v * v * v);
  const LPBasis a = LPBasis::build(z, 6);
  const LPBasis b = LPBasis::build(g, 6);
  EXPECT_TRUE(a.table() == b.table());
  EXPECT_TRUE(a.values(z) == b.values(g));
}

namespace {

double legendre_gap(std::size_t n, std::uint64_t seed) {
  const auto z = normal_sample(n, seed);
  const LPBasis b = LPBasis::build(z, 4);
  const auto r = oracle::ranks(z);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (int j = 1; j <= 4; ++j) worst = std::max(worst, std::abs(b.eval(z[i], j) - oracle::legendre(j, (r[i] - 0.5) / n)));
  return worst;
}

}  // namespace

TEST(LPBasisTest, ContinuousAgreementWithLegendre) {
  EXPECT_LT(legendre_gap(20000, 6), 1e-6);
}

TEST(LPBasisTest, LegendreGapShrinksQuadratically) {
  const double a = legendre_gap(500, 6);
  const double b = legendre_gap(5000, 6);
  EXPECT_GT(a / b, 80.0);
  EXPECT_LT(a / b, 120.0);
}

TEST(LPBasisTest, PowerCoefficientsReconstructColumns) {
  const auto z = normal_sample(120, 7);
  const LPBasis b = LPBasis::build(z, 5);
  const Matrix& c = b.power_coefficients();
  for (std::size_t k = 0; k < b.distinct_count(); ++k) {
    const double t1 = b.table()(static_cast<Eigen::Index>(k), 0);
    for (int j = 0; j < b.degree(); ++j) {
      double s = 0.0;
      double p = 1.0;
      for (Eigen::Index q = 0; q < c.cols(); ++q) {
        s += c(j, q) * p;
        p *= t1;
      }
      EXPECT_NEAR(s, b.table()(static_cast<Eigen::Index>(k), j), 1e-8);
    }
  }
}

TEST(LPBasisTest, BinaryColumnGetsOneFeature) {
  Matrix x(8, 3);
  for (int i = 0; i < 8; ++i) {
    x(i, 0) = i * 1.5;
    x(i, 1) = i % 2;
    x(i, 2) = 4.0;
  }
  const FeatureMatrix fm = lp_feature_matrix(x, 4, {"a", "b", "c"});
  EXPECT_EQ(fm.values.cols(), 5);
  ASSERT_EQ(fm.map.skipped().size(), 1u);
  EXPECT_EQ(fm.map.skipped()[0], 2u);
  EXPECT_EQ(fm.map.labels()[4].variable, 1u);
  EXPECT_EQ(fm.map.labels()[4].degree, 1);
  EXPECT_EQ(fm.map.labels()[0].name, "T1(a)");
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(std::abs(fm.values(i, 4)), 1.0, 1e-12);
}

TEST(LPBasisTest, TiedColumnIsPiecewiseConstant) {
  const auto z = tied_sample(200, 4, 8);
  Matrix x(200, 1);
  for (int i = 0; i < 200; ++i) x(i, 0) = z[static_cast<std::size_t>(i)];
  const FeatureMatrix fm = lp_feature_matrix(x, 4);
  EXPECT_EQ(fm.values.cols(), 3);
  for (int i = 0; i < 200; ++i)
    for (int k = 0; k < 200; ++k)
      if (z[static_cast<std::size_t>(i)] == z[static_cast<std::size_t>(k)]) EXPECT_EQ(fm.values(i, 2), fm.values(k, 2));
}

TEST(LPBasisTest, AllConstantCovariatesRejected) {
  Matrix x = Matrix::Constant(10, 2, 3.0);
  try {
    build_feature_map(x, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConstantColumn);
  }
}

TEST(LPBasisTest, ParallelTransformMatchesSerial) {
  Matrix x(500, 3);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> d;
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = d(rng);
  const FeatureMap fm = build_feature_map(x, 4);
  EXPECT_TRUE(fm.transform(x, Execution::Serial) == fm.transform(x, Execution::Parallel));
}
