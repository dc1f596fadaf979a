#include <gtest/gtest.h>

#include <filesystem>

#include "upm/data_io.hpp"
#include "upm/density.hpp"
#include "upm/error.hpp"
#include "upm/serialize.hpp"

using namespace upm;

namespace {

Matrix queries() {
  Matrix q(7, 1);
  q << -3.9, -2.0, -0.5, 0.0, 0.7, 2.0, 3.5;
  return q;
}

void expect_identical(const ContrastModel& a, const ContrastModel& b) {
  const auto ca = a.coefficients_at(queries());
  const auto cb = b.coefficients_at(queries());
  ASSERT_EQ(ca.size(), cb.size());
  for (std::size_t i = 0; i < ca.size(); ++i) EXPECT_EQ(ca[i].values, cb[i].values);
  const std::vector<double> x{1.3};
  const auto da = a.density_at(x);
  const auto db = b.density_at(x);
  for (double y : {-4.0, -1.0, 0.0, 2.5}) {
    EXPECT_EQ(da.pdf(y), db.pdf(y));
    EXPECT_EQ(da.cdf(y), db.cdf(y));
  }
  EXPECT_EQ(a.response_scores(0.3), b.response_scores(0.3));
  EXPECT_EQ(a.pivot().kind(), b.pivot().kind());
  EXPECT_EQ(a.learner_spec().name(), b.learner_spec().name());
}

}  // namespace

TEST(SerializeTest, RoundTripEveryLearner) {
  const Dataset d = gen_butterfly(300, 3);
  for (const LearnerSpec& spec : {LearnerSpec::knn(15), LearnerSpec::ols(), LearnerSpec::lasso(), LearnerSpec::lasso(0.05),
                                  LearnerSpec::gbm(40, 1, 0.1, 0.7)}) {
    ContrastConfig cfg;
    cfg.learner = spec;
    cfg.learner.seed = 11;
    const ContrastModel m = fit_contrast(d.x, d.y, cfg);
    const std::string text = serialize_model(m);
    const ContrastModel back = deserialize_model(text);
    expect_identical(m, back);
    EXPECT_EQ(serialize_model(back), text) << spec.name();
  }
}

TEST(SerializeTest, RoundTripPivots) {
  const Dataset d = gen_butterfly(200, 4);
  for (const Pivot& p : {Pivot::gaussian(0.1, 2.5), Pivot::empirical_marginal(d.y), Pivot::empirical_marginal(d.y, 0.4)}) {
    ContrastConfig cfg;
    cfg.pivot = p;
    const ContrastModel m = fit_contrast(d.x, d.y, cfg);
    const ContrastModel back = deserialize_model(serialize_model(m));
    expect_identical(m, back);
    EXPECT_EQ(back.pivot().bandwidth(), m.pivot().bandwidth());
  }
  // Marginal-score models carry the response basis.
  const ContrastModel m = fit_contrast(d.x, d.y);
  ASSERT_TRUE(m.marginal_scores());
  const ContrastModel back = deserialize_model(serialize_model(m));
  EXPECT_TRUE(back.marginal_scores());
  expect_identical(m, back);
}

TEST(SerializeTest, FileRoundTrip) {
  std::filesystem::create_directories(UPM_TEST_TMP);
  const std::string path = std::string(UPM_TEST_TMP) + "/model.json";
  const Dataset d = gen_butterfly(150, 5);
  const ContrastModel m = fit_contrast(d.x, d.y);
  save_model(path, m);
  expect_identical(m, load_model(path));
}

TEST(SerializeTest, LearnerSpecRoundTrip) {
  LearnerSpec s = LearnerSpec::gbm(17, 1, 0.05, 0.5);
  s.seed = 99;
  const LearnerSpec back = deserialize_learner_spec(serialize_learner_spec(s));
  EXPECT_EQ(back.seed, 99u);
  const auto& g = std::get<GbmSpec>(back.kind);
  EXPECT_EQ(g.trees, 17);
  EXPECT_EQ(g.depth, 1);
  EXPECT_EQ(g.shrinkage, 0.05);
  EXPECT_EQ(g.subsample, 0.5);
  const LearnerSpec l = deserialize_learner_spec(serialize_learner_spec(LearnerSpec::lasso(0.25)));
  EXPECT_EQ(std::get<LinearSpec>(l.kind).lambda, 0.25);
}

TEST(SerializeTest, Rejections) {
  const Dataset d = gen_butterfly(100, 6);
  ContrastConfig cfg;
  cfg.pivot = Pivot::custom([](double) { return 0.1; }, [](double y) { return y; }, [](double p) { return p; });
  const ContrastModel m = fit_contrast(d.x, d.y, cfg);
  auto code_of = [](const std::function<void()>& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoError;
  };
  EXPECT_EQ(code_of([&] { serialize_model(m); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { deserialize_model("{not json"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { deserialize_model(R"({"format":"other"})"); }), ErrorCode::ParseError);
  const std::string good = serialize_model(fit_contrast(d.x, d.y));
  std::string wrong = good;
  const auto pos = wrong.find("\"version\": 1");
  ASSERT_NE(pos, std::string::npos);
  wrong.replace(pos, 12, "\"version\": 9");
  EXPECT_EQ(code_of([&] { deserialize_model(wrong); }), ErrorCode::ParseError);
}
