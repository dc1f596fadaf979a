#include "upm/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "upm/error.hpp"

namespace upm {

namespace {

std::vector<std::string> split_fields(const std::string& line, std::size_t row) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  require(!quoted, ErrorCode::ParseError, "unterminated quote on line " + std::to_string(row));
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(const std::string& cell) {
  const std::string t = trim(cell);
  if (t.empty()) return std::nullopt;
  const char* first = t.data();
  if (*first == '+') ++first;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

}  // namespace

Dataset gen_butterfly(std::size_t n, std::uint64_t seed) {
  require(n >= 2, ErrorCode::InvalidArgument, "butterfly generator needs n >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(-4.0, 4.0);
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> noise(0.0, 1.0);
  Dataset d;
  d.x.resize(static_cast<Eigen::Index>(n), 1);
  d.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = ux(rng);
    const double s = coin(rng) ? 1.0 : -1.0;
    d.x(static_cast<Eigen::Index>(i), 0) = x;
    d.y[i] = s * x + noise(rng);
  }
  d.feature_names = {"x"};
  d.provenance = "butterfly(n=" + std::to_string(n) + ", seed=" + std::to_string(seed) + ")";
  return d;
}

double butterfly_conditional_cdf(double x, double y) { return 0.5 * (normal_cdf(y - x) + normal_cdf(y + x)); }

HeteroKind parse_hetero_kind(const std::string& name) {
  if (name == "location") return HeteroKind::Location;
  if (name == "scale") return HeteroKind::Scale;
  if (name == "skew") return HeteroKind::Skew;
  if (name == "treatment") return HeteroKind::Treatment;
  fail(ErrorCode::InvalidArgument, "unknown generator kind '" + name + "'");
}

std::string hetero_name(HeteroKind kind) {
  switch (kind) {
    case HeteroKind::Location:
      return "location";
    case HeteroKind::Scale:
      return "scale";
    case HeteroKind::Skew:
      return "skew";
    case HeteroKind::Treatment:
      return "treatment";
  }
  return "unknown";
}

HeteroDataset gen_heteroscedastic(HeteroKind kind, std::size_t n, const HeteroParams& params, std::uint64_t seed) {
  require(n >= 2, ErrorCode::InvalidArgument, "generator needs n >= 2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  HeteroDataset out;
  Dataset& d = out.data;
  d.x.resize(static_cast<Eigen::Index>(n), 1);
  d.y.resize(n);
  d.feature_names = {"x"};
  d.provenance = hetero_name(kind) + "(n=" + std::to_string(n) + ", seed=" + std::to_string(seed) + ")";
  const double beta = params.beta;
  const double delta = params.delta;
  const double gamma = params.gamma;
  switch (kind) {
    case HeteroKind::Location: {
      std::uniform_real_distribution<double> ux(-2.0, 2.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double x = ux(rng);
        d.x(static_cast<Eigen::Index>(i), 0) = x;
        d.y[i] = beta * x + noise(rng);
      }
      out.conditional_cdf = [beta](std::span<const double> x, double, double y) { return normal_cdf(y - beta * x[0]); };
      break;
    }
    case HeteroKind::Scale: {
      std::uniform_real_distribution<double> ux(-2.0, 2.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double x = ux(rng);
        d.x(static_cast<Eigen::Index>(i), 0) = x;
        d.y[i] = (1.0 + std::abs(x)) * noise(rng);
      }
      out.conditional_cdf = [](std::span<const double> x, double, double y) {
        return normal_cdf(y / (1.0 + std::abs(x[0])));
      };
      break;
    }
    case HeteroKind::Skew: {
      std::uniform_real_distribution<double> ux(-2.0, 2.0);
      std::exponential_distribution<double> expo(1.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double x = ux(rng);
        d.x(static_cast<Eigen::Index>(i), 0) = x;
        d.y[i] = x < 0.0 ? noise(rng) : expo(rng) - 1.0;
      }
      out.conditional_cdf = [](std::span<const double> x, double, double y) {
        if (x[0] < 0.0) return normal_cdf(y);
        return y <= -1.0 ? 0.0 : 1.0 - std::exp(-(y + 1.0));
      };
      break;
    }
    case HeteroKind::Treatment: {
      std::uniform_real_distribution<double> ux(0.0, 1.0);
      std::bernoulli_distribution coin(0.5);
      std::vector<double> z(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double x = ux(rng);
        z[i] = coin(rng) ? 1.0 : 0.0;
        d.x(static_cast<Eigen::Index>(i), 0) = x;
        d.y[i] = x + delta * z[i] + (1.0 + gamma * z[i]) * noise(rng);
      }
      d.treatment = std::move(z);
      out.conditional_cdf = [delta, gamma](std::span<const double> x, double zz, double y) {
        return normal_cdf((y - x[0] - delta * zz) / (1.0 + gamma * zz));
      };
      break;
    }
  }
  return out;
}

Dataset load_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::IoError, "cannot open '" + path + "'");
  std::string line;
  std::size_t row = 1;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::ParseError, "'" + path + "' has no header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  std::vector<std::string> header = split_fields(line, row);
  for (auto& h : header) h = trim(h);

  const auto find = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    require(it != header.end(), ErrorCode::MissingColumn, "column '" + name + "' not found in '" + path + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  require(!options.response.empty(), ErrorCode::InvalidArgument, "a response column is required");
  const std::size_t y_col = find(options.response);
  std::optional<std::size_t> z_col;
  if (options.treatment) z_col = find(*options.treatment);
  std::vector<std::size_t> x_cols;
  if (options.features.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (c != y_col && (!z_col || c != *z_col)) x_cols.push_back(c);
  } else {
    for (const auto& f : options.features) x_cols.push_back(find(f));
  }

  Dataset d;
  d.response_name = options.response;
  for (auto c : x_cols) d.feature_names.push_back(header[c]);
  std::vector<std::vector<double>> rows;
  std::vector<double> z;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line, row);
    require(fields.size() == header.size(), ErrorCode::ParseError,
            "line " + std::to_string(row) + " has " + std::to_string(fields.size()) + " fields, header has " +
                std::to_string(header.size()));
    const auto yv = parse_number(fields[y_col]);
    std::optional<double> zv;
    if (z_col) {
      zv = parse_number(fields[*z_col]);
      require(!zv || *zv == 0.0 || *zv == 1.0, ErrorCode::ParseError,
              "line " + std::to_string(row) + ", column '" + header[*z_col] + "': treatment must be 0 or 1");
    }
    std::vector<double> xs;
    bool ok = yv.has_value() && (!z_col || zv.has_value());
    for (auto c : x_cols) {
      const auto v = parse_number(fields[c]);
      if (!v) {
        ok = false;
        break;
      }
      xs.push_back(*v);
    }
    if (!ok) {
      ++d.dropped_rows;
      continue;
    }
    d.y.push_back(*yv);
    if (z_col) z.push_back(*zv);
    rows.push_back(std::move(xs));
  }
  require(!d.y.empty(), ErrorCode::EmptySample, "'" + path + "' has no usable rows");
  d.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(x_cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < x_cols.size(); ++c) d.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
  if (z_col) d.treatment = std::move(z);
  d.provenance = "csv(" + path + ")";
  return d;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  require(header.size() == columns.size(), ErrorCode::DimensionMismatch, "one header name per column");
  const std::size_t n = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns) require(c.size() == n, ErrorCode::DimensionMismatch, "CSV columns differ in length");
  std::ofstream out(path);
  require(out.good(), ErrorCode::IoError, "cannot write '" + path + "'");
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << quote(header[c]);
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << format_number(columns[c][i]);
    out << '\n';
  }
  require(out.good(), ErrorCode::IoError, "failed writing '" + path + "'");
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
  for (Eigen::Index c = 0; c < data.x.cols(); ++c) {
    header.push_back(static_cast<std::size_t>(c) < data.feature_names.size() ? data.feature_names[c]
                                                                             : "x" + std::to_string(c + 1));
    columns.emplace_back(data.x.col(c).data(), data.x.col(c).data() + data.x.rows());
  }
  if (data.treatment) {
    header.push_back("z");
    columns.push_back(*data.treatment);
  }
  header.push_back(data.response_name);
  columns.push_back(data.y);
  write_csv(path, header, columns);
}

Dataset subset(const Dataset& data, const std::vector<std::size_t>& rows) {
  Dataset out;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), data.x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i] < data.size(), ErrorCode::DimensionMismatch, "subset row out of range");
    out.x.row(static_cast<Eigen::Index>(i)) = data.x.row(static_cast<Eigen::Index>(rows[i]));
    out.y.push_back(data.y[rows[i]]);
  }
  if (data.treatment) {
    std::vector<double> z;
    for (auto r : rows) z.push_back((*data.treatment)[r]);
    out.treatment = std::move(z);
  }
  out.feature_names = data.feature_names;
  out.response_name = data.response_name;
  out.provenance = data.provenance;
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double holdout_fraction, std::uint64_t seed) {
  require(holdout_fraction > 0.0 && holdout_fraction < 1.0, ErrorCode::InvalidArgument,
          "holdout fraction must lie in (0,1)");
  const std::size_t n = data.size();
  const auto h = static_cast<std::size_t>(std::floor(holdout_fraction * static_cast<double>(n)));
  require(h >= 1 && h < n, ErrorCode::DegenerateSplit,
          "split of " + std::to_string(n) + " rows leaves an empty part");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < h; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  std::vector<std::size_t> hold(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(h));
  std::vector<std::size_t> train(idx.begin() + static_cast<std::ptrdiff_t>(h), idx.end());
  std::sort(hold.begin(), hold.end());
  std::sort(train.begin(), train.end());
  return {subset(data, train), subset(data, hold)};
}

}  // namespace upm
