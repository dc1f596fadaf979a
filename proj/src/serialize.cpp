#include "upm/serialize.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "upm/error.hpp"

namespace upm {

namespace {

using Json = nlohmann::ordered_json;

Json vec(const Vector& v) { return Json(to_std(v)); }

Json mat(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
    rows.push_back(row);
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Vector read_vec(const Json& j) {
  const auto v = j.get<std::vector<double>>();
  return to_eigen(v);
}

Matrix read_mat(const Json& j) {
  const auto r = j.at("rows").get<Eigen::Index>();
  const auto c = j.at("cols").get<Eigen::Index>();
  Matrix m(r, c);
  const Json& data = j.at("data");
  require(static_cast<Eigen::Index>(data.size()) == r, ErrorCode::ParseError, "matrix row count mismatch");
  for (Eigen::Index i = 0; i < r; ++i) {
    const auto row = data[static_cast<std::size_t>(i)].get<std::vector<double>>();
    require(static_cast<Eigen::Index>(row.size()) == c, ErrorCode::ParseError, "matrix column count mismatch");
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = row[static_cast<std::size_t>(k)];
  }
  return m;
}

Json basis_json(const LPBasis& b) {
  return Json{{"sample_size", b.sample_size()},
              {"requested_degree", b.requested_degree()},
              {"distinct", std::vector<double>(b.distinct_values().begin(), b.distinct_values().end())},
              {"pmf", std::vector<double>(b.pmf().begin(), b.pmf().end())},
              {"mid", std::vector<double>(b.mid_distribution().begin(), b.mid_distribution().end())},
              {"table", mat(b.table())},
              {"power_coefficients", mat(b.power_coefficients())}};
}

LPBasis read_basis(const Json& j) {
  return LPBasis::from_parts(j.at("distinct").get<std::vector<double>>(), j.at("pmf").get<std::vector<double>>(),
                             j.at("mid").get<std::vector<double>>(), read_mat(j.at("table")),
                             read_mat(j.at("power_coefficients")), j.at("sample_size").get<std::size_t>(),
                             j.at("requested_degree").get<int>());
}

Json spec_json(const LearnerSpec& spec) {
  Json j{{"kind", spec.name()}, {"seed", spec.seed}};
  if (const auto* k = std::get_if<KnnSpec>(&spec.kind)) j["k"] = k->k;
  if (const auto* l = std::get_if<LinearSpec>(&spec.kind)) {
    j["lambda"] = l->lambda ? Json(*l->lambda) : Json(nullptr);
    j["path_length"] = l->path_length;
    j["path_ratio"] = l->path_ratio;
    j["max_sweeps"] = l->max_sweeps;
    j["tolerance"] = l->tolerance;
  }
  if (const auto* g = std::get_if<GbmSpec>(&spec.kind)) {
    j["trees"] = g->trees;
    j["depth"] = g->depth;
    j["shrinkage"] = g->shrinkage;
    j["subsample"] = g->subsample;
  }
  return j;
}

LearnerSpec read_spec(const Json& j) {
  const auto kind = j.at("kind").get<std::string>();
  LearnerSpec spec;
  if (kind == "knn") {
    spec.kind = KnnSpec{j.at("k").get<int>()};
  } else if (kind == "ols" || kind == "lasso") {
    LinearSpec l;
    l.penalty = kind == "lasso" ? Penalty::Lasso : Penalty::None;
    if (!j.at("lambda").is_null()) l.lambda = j.at("lambda").get<double>();
    l.path_length = j.at("path_length").get<int>();
    l.path_ratio = j.at("path_ratio").get<double>();
    l.max_sweeps = j.at("max_sweeps").get<int>();
    l.tolerance = j.at("tolerance").get<double>();
    spec.kind = l;
  } else if (kind == "gbm") {
    spec.kind = GbmSpec{j.at("trees").get<int>(), j.at("depth").get<int>(), j.at("shrinkage").get<double>(),
                        j.at("subsample").get<double>()};
  } else {
    fail(ErrorCode::ParseError, "unknown learner kind '" + kind + "'");
  }
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.validate();
  return spec;
}

Json learner_json(const FittedLearner& f) {
  Json j{{"kind", f.kind()}, {"feature_count", f.feature_count()}, {"labels", f.labels()}};
  if (const auto* k = std::get_if<KnnState>(&f.state())) {
    j["k"] = k->k;
    j["features"] = mat(k->features);
    j["targets"] = vec(k->targets);
  } else if (const auto* l = std::get_if<LinearState>(&f.state())) {
    j["intercept"] = l->intercept;
    j["coefficients"] = vec(l->coefficients);
    j["center"] = vec(l->center);
    j["scale"] = vec(l->scale);
    j["lambda"] = l->lambda;
    j["singular"] = l->singular;
    j["sweeps"] = l->sweeps;
    j["path_lambdas"] = l->path_lambdas;
    j["path_bic"] = l->path_bic;
  } else if (const auto* g = std::get_if<GbmState>(&f.state())) {
    j["base_score"] = g->base_score;
    j["shrinkage"] = g->shrinkage;
    Json trees = Json::array();
    for (const auto& tree : g->trees) {
      Json nodes = Json::array();
      for (const auto& n : tree) nodes.push_back(Json::array({n.feature, n.threshold, n.left, n.right, n.value}));
      trees.push_back(nodes);
    }
    j["trees"] = trees;
    j["training_loss"] = g->training_loss;
  }
  return j;
}

FittedLearner read_learner(const Json& j) {
  const auto kind = j.at("kind").get<std::string>();
  const auto q = j.at("feature_count").get<std::size_t>();
  auto labels = j.at("labels").get<std::vector<std::string>>();
  if (kind == "knn") {
    KnnState s;
    s.k = j.at("k").get<int>();
    s.features = read_mat(j.at("features"));
    s.targets = read_vec(j.at("targets"));
    return FittedLearner(std::move(s), q, std::move(labels));
  }
  if (kind == "ols" || kind == "lasso") {
    LinearState s;
    s.penalty = kind == "lasso" ? Penalty::Lasso : Penalty::None;
    s.intercept = j.at("intercept").get<double>();
    s.coefficients = read_vec(j.at("coefficients"));
    s.center = read_vec(j.at("center"));
    s.scale = read_vec(j.at("scale"));
    s.lambda = j.at("lambda").get<double>();
    s.singular = j.at("singular").get<bool>();
    s.sweeps = j.at("sweeps").get<int>();
    s.path_lambdas = j.at("path_lambdas").get<std::vector<double>>();
    s.path_bic = j.at("path_bic").get<std::vector<double>>();
    return FittedLearner(std::move(s), q, std::move(labels));
  }
  if (kind == "gbm") {
    GbmState s;
    s.base_score = j.at("base_score").get<double>();
    s.shrinkage = j.at("shrinkage").get<double>();
    for (const auto& tree : j.at("trees")) {
      std::vector<TreeNode> nodes;
      for (const auto& n : tree)
        nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(), n.at(3).get<int>(),
                         n.at(4).get<double>()});
      s.trees.push_back(std::move(nodes));
    }
    s.training_loss = j.at("training_loss").get<std::vector<double>>();
    return FittedLearner(std::move(s), q, std::move(labels));
  }
  fail(ErrorCode::ParseError, "unknown fitted learner kind '" + kind + "'");
}

Json pivot_json(const Pivot& p) {
  switch (p.kind()) {
    case Pivot::Kind::Gaussian:
      return Json{{"kind", "gaussian"}, {"mu", p.mu()}, {"sigma", p.sigma()}};
    case Pivot::Kind::EmpiricalMarginal:
      return Json{{"kind", "empirical_marginal"}, {"bandwidth", p.bandwidth()}, {"sample", p.sample()}};
    case Pivot::Kind::Custom:
      break;
  }
  fail(ErrorCode::InvalidArgument, "custom pivots cannot be serialized");
}

Pivot read_pivot(const Json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "gaussian") return Pivot::gaussian(j.at("mu").get<double>(), j.at("sigma").get<double>());
  if (kind == "empirical_marginal") {
    const auto sample = j.at("sample").get<std::vector<double>>();
    return Pivot::empirical_marginal(sample, j.at("bandwidth").get<double>());
  }
  fail(ErrorCode::ParseError, "unknown pivot kind '" + kind + "'");
}

}  // namespace

std::string serialize_model(const ContrastModel& model) {
  const FeatureMap& fm = model.features();
  Json bases = Json::array();
  for (const auto& b : fm.bases()) bases.push_back(basis_json(b));
  Json learners = Json::array();
  for (const auto& l : model.learners()) learners.push_back(learner_json(l));
  Json doc{{"format", "upm-contrast-model"},
           {"version", kModelFormatVersion},
           {"features",
            {{"input_dim", fm.input_dim()}, {"columns", fm.columns()}, {"names", fm.names()}, {"bases", bases}}},
           {"response_basis", model.response_basis() ? basis_json(*model.response_basis()) : Json(nullptr)},
           {"pivot", pivot_json(model.pivot())},
           {"learner_spec", spec_json(model.learner_spec())},
           {"learners", learners},
           {"training_y", model.training_y()}};
  return doc.dump(1);
}

ContrastModel deserialize_model(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    require(doc.at("format").get<std::string>() == "upm-contrast-model", ErrorCode::ParseError,
            "not a contrast model document");
    const int version = doc.at("version").get<int>();
    require(version == kModelFormatVersion, ErrorCode::ParseError,
            "unsupported model format version " + std::to_string(version));
    const Json& f = doc.at("features");
    std::vector<LPBasis> bases;
    for (const auto& b : f.at("bases")) bases.push_back(read_basis(b));
    FeatureMap fm(f.at("input_dim").get<std::size_t>(), f.at("columns").get<std::vector<std::size_t>>(),
                  std::move(bases), f.at("names").get<std::vector<std::string>>());
    std::optional<LPBasis> rb;
    if (!doc.at("response_basis").is_null()) rb = read_basis(doc.at("response_basis"));
    std::vector<FittedLearner> learners;
    for (const auto& l : doc.at("learners")) learners.push_back(read_learner(l));
    return ContrastModel(std::move(fm), std::move(rb), read_pivot(doc.at("pivot")), std::move(learners),
                         doc.at("training_y").get<std::vector<double>>(), read_spec(doc.at("learner_spec")));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("malformed model file: ") + e.what());
  }
}

void save_model(const std::string& path, const ContrastModel& model) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::IoError, "cannot write '" + path + "'");
  out << serialize_model(model) << '\n';
  require(out.good(), ErrorCode::IoError, "failed writing '" + path + "'");
}

ContrastModel load_model(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::IoError, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return deserialize_model(ss.str());
}

std::string serialize_learner_spec(const LearnerSpec& spec) { return spec_json(spec).dump(); }

LearnerSpec deserialize_learner_spec(const std::string& text) {
  try {
    return read_spec(Json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("malformed learner spec: ") + e.what());
  }
}

}  // namespace upm
