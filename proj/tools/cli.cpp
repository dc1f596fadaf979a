#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "upm/classic.hpp"
#include "upm/contrast.hpp"
#include "upm/data_io.hpp"
#include "upm/density.hpp"
#include "upm/diagnostics.hpp"
#include "upm/error.hpp"
#include "upm/numeric.hpp"
#include "upm/select.hpp"
#include "upm/serialize.hpp"
#include "upm/sharpen.hpp"

namespace upm::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::uint64_t kDefaultSeed = 1;
constexpr const char* kDefaultQuantiles = "0.05,0.30,0.50,0.70,0.95";

bool ci_mode() {
  const char* v = std::getenv("CI");
  if (v == nullptr) return false;
  const std::string s(v);
  return !s.empty() && s != "0" && s != "false";
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("'" + s + "' is not a number");
  }
  if (used != s.size()) throw UsageError("'" + s + "' is not a number");
  return v;
}

std::vector<double> parse_numbers(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split_list(s, ',')) out.push_back(parse_number(item));
  return out;
}

std::vector<int> parse_orders(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_numbers(s)) {
    if (v != std::floor(v)) throw UsageError("orders must be integers");
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw UsageError("empty order list");
  return out;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

// ---------------------------------------------------------------------------
// Shared option groups

struct Common {
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string config;

  std::uint64_t seed_or_default() const { return seed.value_or(kDefaultSeed); }
};

struct DataArgs {
  std::string path;
  std::string response = "y";
  std::string features;
  std::string treatment;
};

struct ModelArgs {
  std::string model;
  std::string learner = "knn";
  int k = 15;
  int trees = 200;
  int depth = 2;
  double shrinkage = 0.1;
  double subsample = 1.0;
  std::string lambda = "bic";
  std::string pivot = "gaussian";
  std::optional<double> pivot_mu;
  std::optional<double> pivot_sigma;
  int m_x = 4;
  int m_y = 6;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out, "Output directory (default: $UPM_OUTPUT_DIR or .)");
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--config", c.config, "Config file of key = value lines; flags override it");
}

void add_data(CLI::App* sub, DataArgs& d, bool treatment) {
  sub->add_option("--data", d.path, "Input CSV (default: <out>/data.csv)");
  sub->add_option("--response", d.response, "Response column");
  sub->add_option("--features", d.features, "Comma-separated feature columns (default: all others)");
  if (treatment) sub->add_option("--treatment", d.treatment, "Binary treatment column");
}

void add_model(CLI::App* sub, ModelArgs& m, bool allow_load) {
  if (allow_load) sub->add_option("--model", m.model, "Saved model file; fits from --data when omitted");
  sub->add_option("--learner", m.learner, "knn, ols, lasso or gbm")->check(CLI::IsMember({"knn", "ols", "lasso", "gbm"}));
  sub->add_option("--k", m.k, "Neighbours for knn");
  sub->add_option("--trees", m.trees, "Boosting rounds for gbm");
  sub->add_option("--depth", m.depth, "Tree depth for gbm (1 or 2)");
  sub->add_option("--shrinkage", m.shrinkage, "Learning rate for gbm");
  sub->add_option("--subsample", m.subsample, "Row fraction per gbm round");
  sub->add_option("--lambda", m.lambda, "Lasso penalty or 'bic'");
  sub->add_option("--pivot", m.pivot, "gaussian or marginal")->check(CLI::IsMember({"gaussian", "marginal"}));
  sub->add_option("--pivot-mu", m.pivot_mu, "Gaussian pivot mean (default: training mean of y)");
  sub->add_option("--pivot-sigma", m.pivot_sigma, "Gaussian pivot sd (default: training sd of y)");
  sub->add_option("--mx", m.m_x, "LP degree per covariate");
  sub->add_option("--my", m.m_y, "LP degree of the response");
}

std::string output_dir(const Common& c) {
  std::string dir = c.out;
  if (dir.empty()) {
    const char* env = std::getenv("UPM_OUTPUT_DIR");
    dir = env != nullptr && *env != '\0' ? env : ".";
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorCode::IoError, "cannot create output directory '" + dir + "'");
  return dir;
}

std::string join_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

Dataset load_data(const DataArgs& d, const std::string& dir, std::vector<std::string> extra = {}) {
  CsvOptions opt;
  opt.response = d.response;
  if (!d.treatment.empty()) opt.treatment = d.treatment;
  opt.features = d.features.empty() ? std::vector<std::string>{} : split_list(d.features, ',');
  if (!extra.empty()) opt.features = std::move(extra);
  const std::string path = d.path.empty() ? join_path(dir, "data.csv") : d.path;
  return load_csv(path, opt);
}

std::optional<double> lambda_value(const ModelArgs& m) {
  if (m.lambda == "bic") return std::nullopt;
  const double v = parse_number(m.lambda);
  if (!(v >= 0.0)) throw UsageError("--lambda must be nonnegative or 'bic'");
  return v;
}

LearnerSpec learner_spec(const ModelArgs& m, std::uint64_t seed) {
  LearnerSpec s;
  if (m.learner == "knn")
    s = LearnerSpec::knn(m.k);
  else if (m.learner == "ols")
    s = LearnerSpec::ols();
  else if (m.learner == "lasso")
    s = LearnerSpec::lasso(lambda_value(m));
  else
    s = LearnerSpec::gbm(m.trees, m.depth, m.shrinkage, m.subsample);
  s.seed = seed;
  s.validate();
  return s;
}

ContrastConfig contrast_config(const ModelArgs& m, const Dataset& train, std::uint64_t seed) {
  ContrastConfig cfg;
  cfg.m_x = m.m_x;
  cfg.m_y = m.m_y;
  cfg.learner = learner_spec(m, seed);
  cfg.feature_names = train.feature_names;
  if (m.pivot == "gaussian")
    cfg.pivot = Pivot::gaussian(m.pivot_mu.value_or(mean(train.y)), m.pivot_sigma.value_or(sample_sd(train.y)));
  else if (m.pivot_mu || m.pivot_sigma)
    throw UsageError("--pivot-mu and --pivot-sigma apply to the gaussian pivot only");
  return cfg;
}

json pivot_json(const Pivot& p) {
  json j;
  j["kind"] = p.name();
  if (p.kind() == Pivot::Kind::Gaussian) {
    j["mu"] = p.mu();
    j["sigma"] = p.sigma();
  } else if (p.kind() == Pivot::Kind::EmpiricalMarginal) {
    j["bandwidth"] = p.bandwidth();
  }
  return j;
}

json model_json(const ContrastModel& m) {
  json j;
  j["learner"] = m.learner_spec().name();
  j["seed"] = m.learner_spec().seed;
  j["n"] = m.sample_size();
  j["m_y"] = m.m_y();
  j["response_scores"] = m.marginal_scores() ? "empirical LP basis" : "Leg_j(F0(y))";
  j["pivot"] = pivot_json(m.pivot());
  json labels = json::array();
  for (const auto& l : m.features().labels()) labels.push_back(l.name);
  j["features"] = labels;
  json skipped = json::array();
  for (auto c : m.features().skipped()) skipped.push_back(c);
  j["constant_columns_skipped"] = skipped;
  return j;
}

// Per-column training medians and ranges recovered from the feature bases.
struct ColumnSummary {
  std::vector<double> median;
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<bool> active;
};

ColumnSummary summarize_columns(const FeatureMap& fm) {
  ColumnSummary s;
  s.median.assign(fm.input_dim(), 0.0);
  s.lo.assign(fm.input_dim(), 0.0);
  s.hi.assign(fm.input_dim(), 0.0);
  s.active.assign(fm.input_dim(), false);
  for (std::size_t b = 0; b < fm.bases().size(); ++b) {
    const auto c = fm.columns()[b];
    const LPBasis& basis = fm.bases()[b];
    const auto v = basis.distinct_values();
    const auto p = basis.pmf();
    double cum = 0.0;
    std::size_t k = 0;
    for (; k + 1 < v.size(); ++k) {
      cum += p[k];
      if (cum >= 0.5) break;
    }
    s.median[c] = v[k];
    s.lo[c] = v.front();
    s.hi[c] = v.back();
    s.active[c] = true;
  }
  return s;
}

std::size_t resolve_column(const std::string& along, const FeatureMap& fm) {
  if (along.empty()) {
    if (fm.columns().empty()) throw UsageError("model has no active covariate");
    return fm.columns().front();
  }
  const auto& names = fm.names();
  const auto it = std::find(names.begin(), names.end(), along);
  if (it != names.end()) return static_cast<std::size_t>(it - names.begin());
  const double v = parse_number(along);
  if (v < 0 || v != std::floor(v) || v >= static_cast<double>(fm.input_dim()))
    throw UsageError("--along must name a feature or give its 0-based index");
  return static_cast<std::size_t>(v);
}

std::vector<std::vector<double>> parse_points(const std::vector<std::string>& at, std::size_t dim) {
  std::vector<std::vector<double>> pts;
  for (const auto& a : at) {
    auto v = parse_numbers(a);
    if (v.size() != dim)
      throw UsageError("query '" + a + "' has " + std::to_string(v.size()) + " coordinates, model expects " +
                       std::to_string(dim));
    pts.push_back(std::move(v));
  }
  return pts;
}

Matrix to_matrix(const std::vector<std::vector<double>>& pts, std::size_t dim) {
  Matrix m(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < dim; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = pts[i][j];
  return m;
}

// Grid along one column with the others at their medians.
std::vector<std::vector<double>> column_grid(const ColumnSummary& s, std::size_t column, int points) {
  std::vector<std::vector<double>> pts;
  for (double v : linspace(s.lo[column], s.hi[column], points)) {
    auto p = s.median;
    p[column] = v;
    pts.push_back(std::move(p));
  }
  return pts;
}

json coefficients_json(const LPCoefficients& c) {
  json j;
  j["x"] = c.x;
  j["lp"] = c.values;
  if (c.threshold) j["threshold"] = *c.threshold;
  j["qpivot"] = qpivot(c);
  return j;
}

json region_json(const PredictionRegion& r) {
  json j;
  j["kind"] = region_name(r.kind);
  j["level"] = r.level;
  json iv = json::array();
  for (const auto& [a, b] : r.intervals) iv.push_back(json::array({a, b}));
  j["intervals"] = iv;
  j["total_length"] = r.total_length;
  j["mass"] = r.mass;
  return j;
}

json qdiv_json(const QdivResult& q) {
  json j;
  j["statistic"] = q.statistic;
  j["p_value"] = q.p_value;
  j["m"] = q.m;
  j["n"] = q.n;
  return j;
}

json hca_json(const HCAReport& r) {
  json j;
  j["n"] = r.n;
  j["m"] = r.m;
  j["level"] = r.level;
  json comps = json::array();
  for (const auto& c : r.components)
    comps.push_back({{"degree", c.degree},
                     {"r_squared", c.r_squared},
                     {"f_statistic", c.f_statistic},
                     {"p_value", c.p_value},
                     {"significant", c.significant}});
  j["components"] = comps;
  return j;
}

void write_hca_csv(const std::string& path, const HCAReport& r) {
  std::vector<double> deg, r2, f, p;
  for (const auto& c : r.components) {
    deg.push_back(c.degree);
    r2.push_back(c.r_squared);
    f.push_back(c.f_statistic);
    p.push_back(c.p_value);
  }
  write_csv(path, {"degree", "r_squared", "f_statistic", "p_value"}, {deg, r2, f, p});
}

void write_qq_csv(const std::string& path, const GofReport& g) {
  std::vector<double> a, b;
  for (const auto& [u, r] : g.qq) {
    a.push_back(u);
    b.push_back(r);
  }
  write_csv(path, {"uniform_quantile", "residual_quantile"}, {a, b});
}

json gof_json(const GofReport& g) {
  json j;
  j["qdiv"] = qdiv_json(g.qdiv);
  j["ks"] = {{"statistic", g.ks.statistic}, {"p_value", g.ks.p_value}};
  return j;
}

// Writes density and contrast curves for query `index` (1-based) and returns a summary.
json density_outputs(const ConditionalDensity& cd, const std::string& dir, std::size_t index, int grid) {
  const double lo = cd.quantile(1e-4);
  const double hi = cd.quantile(1.0 - 1e-4);
  const auto ys = linspace(lo, hi, grid);
  const Curve pdf = pdf_curve(cd, ys);
  const Curve cdf = cdf_curve(cd, ys);
  write_csv(join_path(dir, "density_" + std::to_string(index) + ".csv"), {"y", "pdf", "cdf"},
            {ys, pdf.values, cdf.values});
  std::vector<double> u, d, raw;
  for (int i = 0; i < grid; ++i) {
    const double ui = (i + 0.5) / grid;
    u.push_back(ui);
    d.push_back(cd.contrast().value(ui));
    raw.push_back(cd.contrast().raw(ui));
  }
  write_csv(join_path(dir, "contrast_" + std::to_string(index) + ".csv"), {"u", "d", "d_raw"}, {u, d, raw});
  json j;
  j["normalizer"] = cd.normalizer();
  j["series_nonnegative"] = cd.contrast().nonnegative();
  j["mean"] = cd.mean();
  j["sd"] = cd.sd();
  j["median"] = cd.quantile(0.5);
  return j;
}

std::vector<RegionKind> region_kinds(const std::string& kind) {
  if (kind == "all") return {RegionKind::Quantile, RegionKind::Gaussian, RegionKind::HighestDensity};
  try {
    return {parse_region_kind(kind)};
  } catch (const Error&) {
    throw UsageError("unknown region kind '" + kind + "'");
  }
}

// ---------------------------------------------------------------------------
// Reports

json echo_config(const CLI::App* sub) {
  json j;
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name.empty()) continue;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      if (opt->get_expected_max() == 0)
        j[name] = true;
      else if (res.size() == 1)
        j[name] = res.front();
      else
        j[name] = res;
    } else {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

void write_report(const std::string& path, const std::string& command, const json& body) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::IoError, "cannot write '" + path + "'");
  json header;
  header["generated"] = utc_timestamp();
  header["tool"] = "upm";
  header["command"] = command;
  out << header.dump() << '\n' << body.dump(2) << '\n';
  require(out.good(), ErrorCode::IoError, "write to '" + path + "' failed");
}

// ---------------------------------------------------------------------------
// Config files

std::string strip_quotes(std::string v) {
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) v = v.substr(1, v.size() - 2);
  return v;
}

bool given_on_command_line(const std::vector<std::string>& args, const std::string& flag) {
  for (const auto& a : args)
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  return false;
}

// Appends key = value settings from the subcommand's --config file for every
// option the command line leaves unset.
std::vector<std::string> apply_config(std::vector<std::string> args, CLI::App& app) {
  if (args.empty()) return args;
  CLI::App* sub = nullptr;
  try {
    sub = app.get_subcommand(args.front());
  } catch (const CLI::OptionNotFound&) {
    return args;
  }
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in.good()) throw UsageError("cannot open config file '" + path + "'");
  std::string line;
  std::string section;
  int lineno = 0;
  std::vector<std::string> extra;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    if (!section.empty() && section != sub->get_name()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = strip_quotes(trim(line.substr(eq + 1)));
    const std::string flag = "--" + key;
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    if (opt == nullptr || key == "config")
      throw UsageError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "' for " + sub->get_name());
    if (given_on_command_line(args, flag)) continue;
    if (opt->get_expected_max() == 0) {
      if (value == "true" || value == "1" || value == "yes") extra.push_back(flag);
    } else if (opt->get_items_expected_max() > 1) {
      for (const auto& item : split_list(value, ';')) {
        extra.push_back(flag);
        extra.push_back(item);
      }
    } else {
      extra.push_back(flag);
      extra.push_back(value);
    }
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

// ---------------------------------------------------------------------------
// Subcommands

struct Runner {
  std::ostream& out;
  std::ostream& err;
  CLI::App* sub = nullptr;
  std::function<void()> body;
};

ContrastModel obtain_model(const ModelArgs& m, const DataArgs& d, const std::string& dir, std::uint64_t seed) {
  if (!m.model.empty()) return load_model(m.model);
  const Dataset data = load_data(d, dir);
  return fit_contrast(data.x, data.y, contrast_config(m, data, seed));
}

struct SimulateCmd {
  Common common;
  std::string kind = "butterfly";
  std::size_t n = 350;
  HeteroParams params;
  std::string file = "data.csv";

  void add(CLI::App* s) {
    add_common(s, common);
    s->add_option("kind", kind, "butterfly, location, scale, skew or treatment")
        ->check(CLI::IsMember({"butterfly", "location", "scale", "skew", "treatment"}));
    s->add_option("--n", n, "Sample size");
    s->add_option("--beta", params.beta, "Location slope");
    s->add_option("--delta", params.delta, "Treatment shift");
    s->add_option("--gamma", params.gamma, "Treatment scale change");
    s->add_option("--file", file, "Output file name inside --out");
  }

  void run(const CLI::App* s, std::ostream& out) {
    if (!common.seed && ci_mode()) throw UsageError("--seed is required for generators when CI is set");
    const std::uint64_t seed = common.seed_or_default();
    const std::string dir = output_dir(common);
    const Dataset d = kind == "butterfly" ? gen_butterfly(n, seed)
                                          : gen_heteroscedastic(parse_hetero_kind(kind), n, params, seed).data;
    const std::string path = join_path(dir, file);
    write_dataset_csv(path, d);
    json body;
    body["config"] = echo_config(s);
    body["provenance"] = d.provenance;
    body["n"] = d.size();
    body["columns"] = d.feature_names;
    body["response_mean"] = mean(d.y);
    body["response_sd"] = sample_sd(d.y);
    write_report(join_path(dir, "simulate.json"), "simulate", body);
    out << "wrote " << path << '\n';
  }
};

struct FitCmd {
  Common common;
  DataArgs data;
  ModelArgs model;
  std::string save = "model.json";
  std::vector<std::string> at;

  void add(CLI::App* s) {
    add_common(s, common);
    add_data(s, data, false);
    add_model(s, model, false);
    s->add_option("--save", save, "Model file name inside --out");
    s->add_option("--at", at, "Query point (comma-separated coordinates); repeatable");
  }

  void run(const CLI::App* s, std::ostream& out) {
    const std::string dir = output_dir(common);
    const Dataset d = load_data(data, dir);
    const ContrastModel m = fit_contrast(d.x, d.y, contrast_config(model, d, common.seed_or_default()));
    const std::string path = join_path(dir, save);
    save_model(path, m);
    json body;
    body["config"] = echo_config(s);
    body["dropped_rows"] = d.dropped_rows;
    body["model"] = model_json(m);
    json q = json::array();
    for (const auto& p : parse_points(at, m.input_dim())) q.push_back(coefficients_json(m.coefficients_at(p)));
    body["coefficients"] = q;
    write_report(join_path(dir, "fit.json"), "fit", body);
    out << "wrote " << path << '\n';
  }
};

struct DensityCmd {
  Common common;
  DataArgs data;
  ModelArgs model;
  std::vector<std::string> at;
  int grid = 401;
  std::optional<double> threshold;

  void add(CLI::App* s) {
    add_common(s, common);
    add_data(s, data, false);
    add_model(s, model, true);
    s->add_option("--at", at, "Query point (comma-separated coordinates); repeatable")->required();
    s->add_option("--grid", grid, "Curve grid points")->check(CLI::Range(3, 1000000));
    s->add_option("--threshold", threshold, "Zero coefficients below this magnitude");
  }

  void run(const CLI::App* s, std::ostream& out) {
    const std::string dir = output_dir(common);
    const ContrastModel m = obtain_model(model, data, dir, common.seed_or_default());
    json body;
    body["config"] = echo_config(s);
    body["model"] = model_json(m);
    json q = json::array();
    std::size_t index = 1;
    for (const auto& p : parse_points(at, m.input_dim())) {
      const ConditionalDensity cd = m.density_at(p, threshold);
      json j = coefficients_json(cd.coefficients());
      j["density"] = density_outputs(cd, dir, index++, grid);
      q.push_back(j);
    }
    body["queries"] = q;
    write_report(join_path(dir, "density.json"), "density", body);
    out << "wrote " << join_path(dir, "density.json") << '\n';
  }
};

struct IntervalCmd {
  Common common;
  DataArgs data;
  ModelArgs model;
  std::vector<std::string> at;
  double alpha = 0.1;
  std::string kind = "all";
  std::optional<double> threshold;
  int hdpi_grid = RegionOptions{}.grid_points;
  double hdpi_tolerance = RegionOptions{}.tolerance;

  void add(CLI::App* s) {
    add_common(s, common);
    add_data(s, data, false);
    add_model(s, model, true);
    s->add_option("--at", at, "Query point (comma-separated coordinates); repeatable")->required();
    s->add_option("--alpha", alpha, "Miscoverage level")->check(CLI::Range(1e-9, 1.0 - 1e-9));
    s->add_option("--kind", kind, "qpi, gpi, hdpi or all");
    s->add_option("--hdpi-grid", hdpi_grid, "Grid points of the highest-density search")->check(CLI::Range(3, 10000000));
    s->add_option("--hdpi-tolerance", hdpi_tolerance, "Allowed coverage error of the highest-density region")
        ->check(CLI::Range(0.0, 0.5));
    s->add_option("--threshold", threshold, "Zero coefficients below this magnitude");
  }

  void run(const CLI::App* s, std::ostream& out) {
    const std::string dir = output_dir(common);
    const auto kinds = region_kinds(kind);
    const ContrastModel m = obtain_model(model, data, dir, common.seed_or_default());
    json body;
    body["config"] = echo_config(s);
    body["model"] = model_json(m);
    json q = json::array();
    for (const auto& p : parse_points(at, m.input_dim())) {
      const ConditionalDensity cd = m.density_at(p, threshold);
      json j = coefficients_json(cd.coefficients());
      json regions = json::array();
      RegionOptions ro;
      ro.grid_points = hdpi_grid;
      ro.tolerance = hdpi_tolerance;
      for (RegionKind k : kinds) regions.push_back(region_json(prediction_region(cd, alpha, k, ro)));
      j["regions"] = regions;
      q.push_back(j);
    }
    body["queries"] = q;
    write_report(join_path(dir, "interval.json"), "interval", body);
    out << "wrote " << join_path(dir, "interval.json") << '\n';
  }
};

struct QuantilesCmd {
  Common common;
  DataArgs data;
  ModelArgs model;
  std::string u = kDefaultQuantiles;
  int grid = 101;
  std::string along;

  void add(CLI::App* s) {
    add_common(s, common);
    add_data(s, data, false);
    add_model(s, model, true);
    s->add_option("--u", u, "Comma-separated quantile levels");
    s->add_option("--grid", grid, "Points along the covariate")->check(CLI::Range(2, 1000000));
    s->add_option("--along", along, "Covariate to vary (name or 0-based index; default first)");
  }

  void run(const CLI::App* s, std::ostream& out) {
    const std::string dir = output_dir(common);
    std::vector<double> levels = parse_numbers(u);
    if (levels.empty()) throw UsageError("--u is empty");
    for (double v : levels)
      if (!(v > 0.0 && v < 1.0)) throw UsageError("quantile levels must lie in (0,1)");
    std::sort(levels.begin(), levels.end());
    const ContrastModel m = obtain_model(model, data, dir, common.seed_or_default());
    const ColumnSummary cs = summarize_columns(m.features());
    const std::size_t column = resolve_column(along, m.features());
    if (!cs.active[column]) throw UsageError("covariate " + std::to_string(column) + " is constant in the model");
    const auto pts = column_grid(cs, column, grid);
    const auto coeffs = m.coefficients_at(to_matrix(pts, m.input_dim()));
    std::vector<std::vector<double>> cols(levels.size() + 1);
    std::size_t crossings = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const ConditionalDensity cd(m.pivot(), coeffs[i]);
      cols[0].push_back(pts[i][column]);
      for (std::size_t l = 0; l < levels.size(); ++l) {
        cols[l + 1].push_back(cd.quantile(levels[l]));
        if (l > 0 && cols[l + 1].back() < cols[l].back()) ++crossings;
      }
    }
    std::vector<std::string> header{m.features().names().empty() ? "x" : m.features().names()[column]};
    for (double v : levels) {
      std::ostringstream h;
      h << "q" << v;
      header.push_back(h.str());
    }
    write_csv(join_path(dir, "quantiles.csv"), header, cols);
    json body;
    body["config"] = echo_config(s);
    body["model"] = model_json(m);
    body["levels"] = levels;
    body["column"] = column;
    body["grid_points"] = pts.size();
    body["crossings"] = crossings;
    body["non_crossing"] = crossings == 0;
    write_report(join_path(dir, "quantiles.json"), "quantiles", body);
    out << "wrote " << join_path(dir, "quantiles.csv") << '\n';
  }
};

struct HcaCmd {
  Common common;
  DataArgs data;
  int m_x = 4;
  int max_j = 4;
  double level = 0.05;

  void add(CLI::App* s) {
    add_common(s, common);
    add_data(s, data, false);
    s->add_option("--mx", m_x, "LP degree per covariate");
    s->add_option("--max-j", max_j, "Highest response degree screened");
    s->add_option("--level", level, "Significance level")->check(CLI::Range(1e-12, 1.0));
  }

  void run(const CLI::App* s, std::ostream& out) {
    const std::string dir = output_dir(common);
    const Dataset d = load_data(data, dir);
    const HCAReport r = hca(d.x, d.y, m_x, max_j, level);
    write_hca_csv(join_path(dir, "hca.csv"), r);
    json body;
    body["config"] = echo_config(s);
    body["dropped_rows"] = d.dropped_rows;
    body["features"] = r.feature_labels;
    body["hca"] = hca_json(r);
    write_report(join_path(dir, "hca.json"), "hca", body);
    out << "wrote " << join_path(dir, "hca.json") << '\n';
  }
};

struct GofCmd {
  Common common;
  DataArgs data;
  ModelArgs model;
  double holdout = 0.15;
  int m = 6;

  void add(CLI::App* s) {
    add_common(s, common);
    add_data(s, data, false);
    add_model(s, model, false);
    s->add_option("--holdout", holdout, "Holdout fraction")->check(CLI::Range(1e-9, 1.0 - 1e-9));
    s->add_option("--m", m, "qDIV degree");
  }

  void run(const CLI::App* s, std::ostream& out) {
    const std::string dir = output_dir(common);
    const std::uint64_t seed = common.seed_or_default();
    const Dataset d = load_data(data, dir);
    const auto [train, hold] = split(d, holdout, derive_seed(seed, 1));
    const ContrastModel cm = fit_contrast(train.x, train.y, contrast_config(model, train, seed));
    const GofReport g = goodness_of_fit(cm, hold.x, hold.y, m);
    write_qq_csv(join_path(dir, "qq.csv"), g);
    json body;
    body["config"] = echo_config(s);
    body["n_train"] = train.size();
    body["n_holdout"] = hold.size();
    body["model"] = model_json(cm);
    body["gof"] = gof_json(g);
    write_report(join_path(dir, "gof.json"), "gof", body);
    out << "wrote " << join_path(dir, "gof.json") << '\n';
  }
};

struct KsampleCmd {
  Common common;
  DataArgs data;
  std::string group = "group";
  std::string orders = "1,2,3,4";

  void add(CLI::App* s) {
    add_common(s, common);
    s->add_option("--data", data.path, "Input CSV (default: <out>/data.csv)");
    s->add_option("--response", data.response, "Response column");
    s->add_option("--group", group, "Integer group label column");
    s->add_option("--orders", orders, "Comma-separated orders among 1..4");
  }

  void run(const CLI::App* s, std::ostream& out) {
    const std::string dir = output_dir(common);
    const auto ord = parse_orders(orders);
    const Dataset d = load_data(data, dir, {group});
    std::vector<int> labels;
    for (Eigen::Index i = 0; i < d.x.rows(); ++i) {
      const double v = d.x(i, 0);
      require(v == std::floor(v) && std::abs(v) < 1e9, ErrorCode::ParseError,
              "group labels must be integers (row " + std::to_string(i + 1) + ")");
      labels.push_back(static_cast<int>(v));
    }
    const KSampleReport r = ksample(d.y, labels, ord);
    json body;
    body["config"] = echo_config(s);
    body["n"] = r.n;
    body["groups"] = r.labels;
    body["group_sizes"] = r.group_sizes;
    body["ties"] = r.ties;
    body["dof"] = r.dof;
    json os = json::array();
    std::vector<double> c_order, c_lp, c_nr2, c_direct, c_p;
    for (const auto& o : r.orders) {
      json j;
      j["order"] = o.order;
      j["name"] = o.name;
      j["available"] = o.available;
      j["lp_value"] = o.lp_value;
      j["n_r_squared"] = o.n_r_squared;
      if (o.direct)
        j["direct"] = *o.direct;
      else
        j["direct"] = nullptr;
      j["p_value"] = o.p_value;
      os.push_back(j);
      c_order.push_back(o.order);
      c_lp.push_back(o.lp_value);
      c_nr2.push_back(o.n_r_squared);
      c_direct.push_back(o.direct.value_or(std::nan("")));
      c_p.push_back(o.p_value);
    }
    body["orders"] = os;
    body["group_means"] = r.group_means;
    write_csv(join_path(dir, "ksample.csv"), {"order", "lp_value", "n_r_squared", "direct", "p_value"},
              {c_order, c_lp, c_nr2, c_direct, c_p});
    write_report(join_path(dir, "ksample.json"), "ksample", body);
    out << "wrote " << join_path(dir, "ksample.json") << '\n';
  }
};

struct PimCmd {
  Common common;
  DataArgs data;
  int m_x = 4;
  std::vector<std::string> at;
  int grid = 101;

  void add(CLI::App* s) {
    add_common(s, common);
    add_data(s, data, false);
    s->add_option("--mx", m_x, "LP degree per covariate");
    s->add_option("--at", at, "Query point (comma-separated coordinates); repeatable");
    s->add_option("--grid", grid, "Points of the CPR curve along the first covariate")->check(CLI::Range(2, 1000000));
  }

  void run(const CLI::App* s, std::ostream& out) {
    const std::string dir = output_dir(common);
    const Dataset d = load_data(data, dir);
    const PimModel pm = pim(d.x, d.y, m_x);
    json body;
    body["config"] = echo_config(s);
    body["dropped_rows"] = d.dropped_rows;
    body["lambda"] = pm.fit.lambda;
    body["intercept"] = pm.fit.intercept;
    json coefs;
    for (std::size_t j = 0; j < pm.features.labels().size(); ++j)
      coefs[pm.features.labels()[j].name] = pm.fit.coefficients[static_cast<Eigen::Index>(j)];
    body["coefficients"] = coefs;
    body["selected"] = pm.selected();
    json q = json::array();
    for (const auto& p : parse_points(at, static_cast<std::size_t>(d.x.cols())))
      q.push_back({{"x", p}, {"lp1", pm.lp1(p)}, {"cpr", pm.cpr(p)}});
    body["queries"] = q;
    const ColumnSummary cs = summarize_columns(pm.features);
    const std::size_t column = pm.features.columns().front();
    std::vector<double> xs, cpr;
    for (const auto& p : column_grid(cs, column, grid)) {
      xs.push_back(p[column]);
      cpr.push_back(pm.cpr(p));
    }
    write_csv(join_path(dir, "cpr.csv"), {"x", "cpr"}, {xs, cpr});
    write_report(join_path(dir, "pim.json"), "pim", body);
    out << "wrote " << join_path(dir, "pim.json") << '\n';
  }
};

struct DifCmd {
  Common common;
  DataArgs data;
  ModelArgs model;
  std::vector<std::string> at;
  int grid = 21;

  DifCmd() {
    data.treatment = "z";
    model.learner = "gbm";
  }

  void add(CLI::App* s) {
    add_common(s, common);
    add_data(s, data, true);
    add_model(s, model, false);
    s->add_option("--at", at, "Query point over the covariates (without z); repeatable");
    s->add_option("--grid", grid, "Default query grid along the first covariate")->check(CLI::Range(2, 1000000));
  }

  void run(const CLI::App* s, std::ostream& out) {
    const std::string dir = output_dir(common);
    if (data.treatment.empty()) throw UsageError("--treatment is required");
    const Dataset d = load_data(data, dir);
    const std::uint64_t seed = common.seed_or_default();
    ContrastConfig cfg = contrast_config(model, d, seed);
    std::vector<std::vector<double>> pts;
    if (at.empty()) {
      const ColumnSummary cs = summarize_columns(build_feature_map(d.x, 1));
      pts = column_grid(cs, 0, grid);
    } else {
      pts = parse_points(at, static_cast<std::size_t>(d.x.cols()));
    }
    const DIFReport r = dif(d.x, *d.treatment, d.y, to_matrix(pts, static_cast<std::size_t>(d.x.cols())), cfg);
    json body;
    body["config"] = echo_config(s);
    body["dropped_rows"] = d.dropped_rows;
    body["m_y"] = r.m_y;
    json ps = json::array();
    std::vector<std::vector<double>> cols(static_cast<std::size_t>(d.x.cols() + 1 + r.m_y));
    for (const auto& p : r.points) {
      ps.push_back({{"x", p.x}, {"dif", p.value}, {"components", p.components}, {"control", p.control},
                    {"treated", p.treated}});
      std::size_t c = 0;
      for (double v : p.x) cols[c++].push_back(v);
      cols[c++].push_back(p.value);
      for (double v : p.components) cols[c++].push_back(v);
    }
    body["points"] = ps;
    std::vector<std::string> header = d.feature_names;
    header.push_back("dif");
    for (int j = 1; j <= r.m_y; ++j) header.push_back("component_" + std::to_string(j));
    write_csv(join_path(dir, "dif.csv"), header, cols);
    write_report(join_path(dir, "dif.json"), "dif", body);
    out << "wrote " << join_path(dir, "dif.json") << '\n';
  }
};

struct OvisCmd {
  Common common;
  DataArgs data;
  std::string orders = "1,2,3";
  int m_x = 1;
  bool raw = false;
  std::string lambda = "bic";

  void add(CLI::App* s) {
    add_common(s, common);
    add_data(s, data, false);
    s->add_option("--orders", orders, "Comma-separated response orders");
    s->add_option("--mx", m_x, "LP degree per covariate (robust variant)");
    s->add_flag("--raw", raw, "Regress on the raw covariates instead of their LP scores");
    s->add_option("--lambda", lambda, "Lasso penalty or 'bic'");
  }

  void run(const CLI::App* s, std::ostream& out) {
    const std::string dir = output_dir(common);
    const Dataset d = load_data(data, dir);
    OvisOptions opt;
    opt.orders = parse_orders(orders);
    opt.m_x = m_x;
    opt.robust = !raw;
    opt.feature_names = d.feature_names;
    if (lambda != "bic") opt.lambda = parse_number(lambda);
    const OvisReport r = shape_predictors(d.x, d.y, opt);
    json body;
    body["config"] = echo_config(s);
    body["dropped_rows"] = d.dropped_rows;
    body["orders"] = r.orders;
    body["lambdas"] = r.lambdas;
    json sel = json::array();
    for (std::size_t o = 0; o < r.orders.size(); ++o) {
      json names = json::array();
      for (auto l : r.selected[o]) names.push_back(r.features[l].name);
      sel.push_back({{"order", r.orders[o]}, {"features", names}});
    }
    body["selected"] = sel;
    json ranked = json::array();
    std::vector<std::vector<double>> cols(2 + r.orders.size());
    std::vector<std::string> header{"rank", "score"};
    for (int o : r.orders) header.push_back("order_" + std::to_string(o));
    std::vector<std::string> names;
    std::size_t rank = 1;
    for (auto l : r.ranking()) {
      const auto& f = r.features[l];
      ranked.push_back({{"feature", f.name}, {"score", f.score}, {"per_order", f.per_order}});
      cols[0].push_back(static_cast<double>(rank++));
      cols[1].push_back(f.score);
      for (std::size_t o = 0; o < f.per_order.size(); ++o) cols[2 + o].push_back(f.per_order[o]);
      names.push_back(f.name);
    }
    body["ranking"] = ranked;
    body["coefficients"] = r.coefficients;
    write_csv(join_path(dir, "ovis.csv"), header, cols);
    // Feature names are not numeric, so they go to a parallel file.
    {
      std::ofstream f(join_path(dir, "ovis_names.csv"));
      f << "rank,feature\n";
      for (std::size_t i = 0; i < names.size(); ++i) f << i + 1 << ',' << names[i] << '\n';
    }
    write_report(join_path(dir, "ovis.json"), "ovis", body);
    out << "wrote " << join_path(dir, "ovis.json") << '\n';
  }
};

struct SharpenCmd {
  Common common;
  DataArgs data;
  ModelArgs model;
  std::string at;
  std::optional<double> weak_lo;
  std::optional<double> weak_hi;
  std::string along;
  std::size_t s = 1000;

  void add(CLI::App* sub) {
    add_common(sub, common);
    add_data(sub, data, false);
    add_model(sub, model, false);
    sub->add_option("--at", at, "Query point (comma-separated coordinates)")->required();
    sub->add_option("--weak-lo", weak_lo, "Lower bound on --along for the weak sample");
    sub->add_option("--weak-hi", weak_hi, "Upper bound on --along for the weak sample");
    sub->add_option("--along", along, "Covariate (name or 0-based index) defining the weak window");
    sub->add_option("--s", s, "Accepted samples")->check(CLI::PositiveNumber);
  }

  void run(const CLI::App* sub, std::ostream& out) {
    const std::string dir = output_dir(common);
    const std::uint64_t seed = common.seed_or_default();
    const Dataset d = load_data(data, dir);
    const ContrastModel m = fit_contrast(d.x, d.y, contrast_config(model, d, seed));
    const auto pts = parse_points({at}, m.input_dim());
    const std::size_t column = resolve_column(along, m.features());
    std::vector<double> weak;
    for (Eigen::Index i = 0; i < d.x.rows(); ++i) {
      const double v = d.x(i, static_cast<Eigen::Index>(column));
      if ((!weak_lo || v >= *weak_lo) && (!weak_hi || v <= *weak_hi)) weak.push_back(d.y[static_cast<std::size_t>(i)]);
    }
    require(!weak.empty(), ErrorCode::EmptySample, "the weak window selects no rows");
    const ConditionalDensity cd = m.density_at(pts.front());
    const std::vector<double> c = contrast_relative_to_weak(cd, weak, m.m_y());
    Sharpener sharp(weak, UnitContrast(c), derive_seed(seed, 2));
    const SharpenResult r = sharp.draw(s);
    write_csv(join_path(dir, "sharpened.csv"), {"y"}, {r.samples});
    const KsResult ks = ks_one_sample(r.samples, [&cd](double y) { return cd.cdf(y); });
    json body;
    body["config"] = echo_config(sub);
    body["weak_size"] = weak.size();
    body["contrast"] = c;
    body["accepted"] = r.samples.size();
    body["proposals"] = r.proposals;
    body["acceptance_rate"] = r.acceptance_rate;
    body["envelope"] = r.envelope;
    body["ks_vs_fitted"] = {{"statistic", ks.statistic}, {"p_value", ks.p_value}};
    write_report(join_path(dir, "sharpen.json"), "sharpen", body);
    out << "wrote " << join_path(dir, "sharpened.csv") << '\n';
  }
};

struct PipelineCmd {
  Common common;
  DataArgs data;
  ModelArgs model;
  std::vector<std::string> at;
  double alpha = 0.1;
  double holdout = 0.15;
  int m = 6;
  int bootstrap = 50;
  double band_level = 0.9;
  int hca_max_j = 4;
  int grid = 401;
  int hdpi_grid = RegionOptions{}.grid_points;

  void add(CLI::App* s) {
    add_common(s, common);
    add_data(s, data, false);
    add_model(s, model, false);
    s->add_option("--at", at, "Query point (comma-separated coordinates); repeatable");
    s->add_option("--hdpi-grid", hdpi_grid, "Grid points of the highest-density search")->check(CLI::Range(3, 10000000));
    s->add_option("--alpha", alpha, "Miscoverage level of the prediction regions")->check(CLI::Range(1e-9, 1.0 - 1e-9));
    s->add_option("--holdout", holdout, "Holdout fraction for validation")->check(CLI::Range(1e-9, 1.0 - 1e-9));
    s->add_option("--m", m, "qDIV degree");
    s->add_option("--bootstrap", bootstrap, "Bootstrap replicates for the regression band (>= 20)");
    s->add_option("--band-level", band_level, "Bootstrap band level")->check(CLI::Range(1e-9, 1.0 - 1e-9));
    s->add_option("--hca-max-j", hca_max_j, "Highest response degree screened by HCA");
    s->add_option("--grid", grid, "Curve grid points")->check(CLI::Range(3, 1000000));
  }

  void run(const CLI::App* s, std::ostream& out) {
    const std::string dir = output_dir(common);
    const std::uint64_t seed = common.seed_or_default();
    const Dataset d = load_data(data, dir);
    const auto [train, hold] = split(d, holdout, derive_seed(seed, 1));
    const ContrastConfig cfg = contrast_config(model, train, seed);
    const FeatureMatrix tx = lp_feature_matrix(train.x, cfg.m_x, train.feature_names);
    const ColumnSummary cs = summarize_columns(tx.map);
    const std::size_t p = static_cast<std::size_t>(d.x.cols());
    std::vector<std::vector<double>> queries = parse_points(at, p);
    if (queries.empty()) queries.push_back(cs.median);

    json body;
    body["config"] = echo_config(s);
    body["data"] = {{"n", d.size()}, {"dropped_rows", d.dropped_rows}, {"n_train", train.size()},
                    {"n_holdout", hold.size()}};

    // Level 0: the learner's regression curve and its bootstrap band.
    const Vector ty = to_eigen(train.y);
    const FittedLearner ml0 = fit(cfg.learner, tx.values, ty);
    const std::size_t column = tx.map.columns().front();
    const auto band_pts = column_grid(cs, column, 41);
    const Matrix band_grid = tx.map.transform(to_matrix(band_pts, p));
    const BootstrapBand band =
        bootstrap_band(cfg.learner, tx.values, ty, band_grid, bootstrap, band_level, derive_seed(seed, 3));
    std::vector<double> band_x;
    for (const auto& q : band_pts) band_x.push_back(q[column]);
    write_csv(join_path(dir, "level0_band.csv"), {"x", "lower", "mean", "upper"},
              {band_x, band.lower, band.mean, band.upper});
    json l0;
    l0["learner"] = cfg.learner.name();
    l0["band_level"] = band_level;
    l0["replicates"] = bootstrap;
    json fitted = json::array();
    for (const auto& q : queries) fitted.push_back({{"x", q}, {"mu", ml0.predict(tx.map.transform_row(q))}});
    l0["regression"] = fitted;
    body["level0"] = l0;

    // Level 1: heterogeneity of the learner's residuals.
    const Vector resid = ty - ml0.predict(tx.values);
    const HCAReport h = hca(train.x, to_std(resid), cfg.m_x, hca_max_j);
    write_hca_csv(join_path(dir, "hca.csv"), h);
    body["level1"] = hca_json(h);

    // Levels 2-5: pivot, contrast, density and prediction regions at each query.
    const ContrastModel cm = fit_contrast(train.x, train.y, cfg);
    body["level2"] = {{"pivot", pivot_json(cm.pivot())}};
    json per = json::array();
    std::size_t index = 1;
    for (const auto& q : queries) {
      const ConditionalDensity cd = cm.density_at(q);
      json j = coefficients_json(cd.coefficients());
      j["density"] = density_outputs(cd, dir, index++, grid);
      json regions = json::array();
      RegionOptions ro;
      ro.grid_points = hdpi_grid;
      for (RegionKind k : {RegionKind::Quantile, RegionKind::Gaussian, RegionKind::HighestDensity})
        regions.push_back(region_json(prediction_region(cd, alpha, k, ro)));
      j["regions"] = regions;
      per.push_back(j);
    }
    body["model"] = model_json(cm);
    body["queries"] = per;

    // Level 6: generalized quantile residuals on the holdout.
    const GofReport g = goodness_of_fit(cm, hold.x, hold.y, m);
    write_qq_csv(join_path(dir, "qq.csv"), g);
    body["level6"] = gof_json(g);

    write_report(join_path(dir, "pipeline.json"), "pipeline", body);
    out << "wrote " << join_path(dir, "pipeline.json") << '\n';
  }
};

int exit_for(const Error& e) {
  switch (e.category()) {
    case ErrorCategory::Usage:
      return kExitUsage;
    case ErrorCategory::Data:
      return kExitData;
    case ErrorCategory::Numeric:
      return kExitNumeric;
  }
  return kExitData;
}

}  // namespace

int run(const std::vector<std::string>& input, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conditional distribution modelling with LP rank-polynomial contrasts", "upm"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  SimulateCmd simulate;
  FitCmd fit_cmd;
  DensityCmd density;
  IntervalCmd interval;
  QuantilesCmd quantiles;
  HcaCmd hca_cmd;
  GofCmd gof;
  KsampleCmd ks;
  PimCmd pim_cmd;
  DifCmd dif_cmd;
  OvisCmd ovis;
  SharpenCmd sharpen;
  PipelineCmd pipeline;

  std::function<void()> action;
  const auto bind = [&](auto& cmd, const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    cmd.add(sub);
    sub->callback([&cmd, sub, &action, &out] { action = [&cmd, sub, &out] { cmd.run(sub, out); }; });
  };
  bind(simulate, "simulate", "Generate a synthetic dataset");
  bind(fit_cmd, "fit", "Fit and save a contrast model");
  bind(density, "density", "Conditional density, cdf and contrast curves");
  bind(interval, "interval", "qPI, gPI and hdPI prediction regions");
  bind(quantiles, "quantiles", "Conditional quantile curves along a covariate");
  bind(hca_cmd, "hca", "Heterogeneity component analysis");
  bind(gof, "gof", "Holdout quantile residuals, qDIV and KS");
  bind(ks, "ksample", "LP k-sample rank statistics");
  bind(pim_cmd, "pim", "Comparison probability regression");
  bind(dif_cmd, "dif", "Distributional impact of a binary treatment");
  bind(ovis, "ovis", "Shape predictors and omnibus variable importance");
  bind(sharpen, "sharpen", "d-sharp refinement of weak samples");
  bind(pipeline, "pipeline", "Levels 0-6 end to end");

  std::vector<std::string> args;
  try {
    args = apply_config(input, app);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = &app;
    for (const CLI::App* s : app.get_subcommands()) target = s;
    out << target->help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    const CLI::App* target = &app;
    for (const CLI::App* s : app.get_subcommands()) target = s;
    err << target->help();
    return kExitUsage;
  }

  try {
    if (action) action();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

int run(const std::vector<std::string>& args) { return run(args, std::cout, std::cerr); }

ReportFile read_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::IoError, "cannot open '" + path + "'");
  ReportFile r;
  std::getline(in, r.header);
  std::ostringstream rest;
  rest << in.rdbuf();
  r.body = rest.str();
  return r;
}

}  // namespace upm::cli
