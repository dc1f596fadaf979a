#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "upm/data_io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream o, e;
  const int code = upm::cli::run(args, o, e);
  return {code, o.str(), e.str()};
}

// Fresh output directory per test.
std::string dir(const std::string& name) {
  const std::string d = std::string(UPM_TEST_TMP) + "/cli/" + name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

json body(const std::string& path) { return json::parse(upm::cli::read_report(path).body); }

std::vector<std::vector<double>> read_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream s(line);
    std::string cell;
    while (std::getline(s, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

void simulate(const std::string& out, const std::string& kind = "butterfly", int n = 350, int seed = 7) {
  const Outcome r = run({"simulate", kind, "--n", std::to_string(n), "--seed", std::to_string(seed), "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
}

}  // namespace

TEST(CliTest, SimulateThenPipeline) {
  const std::string d = dir("pipeline");
  simulate(d);
  const Outcome r = run({"pipeline", "--learner", "knn", "--at", "2", "--alpha", "0.32", "--seed", "7", "--out", d});
  ASSERT_EQ(r.code, 0) << r.err;
  const json b = body(d + "/pipeline.json");
  EXPECT_EQ(b["data"]["n"], 350);
  EXPECT_EQ(b["data"]["n_holdout"], 52);
  const json& q = b["queries"][0];
  EXPECT_EQ(q["lp"].size(), 6u);
  bool found = false;
  for (const auto& region : q["regions"]) {
    if (region["kind"] != "hdPI") continue;
    found = true;
    EXPECT_EQ(region["intervals"].size(), 2u);
    EXPECT_NEAR(region["mass"].get<double>(), 0.68, 0.005);
  }
  EXPECT_TRUE(found);
  const double p = b["level6"]["qdiv"]["p_value"];
  EXPECT_GE(p, 0.0);
  EXPECT_LE(p, 1.0);
  EXPECT_EQ(b["level6"]["qdiv"]["n"], 52);
  EXPECT_EQ(b["level1"]["components"].size(), 4u);
  for (const char* f : {"qq.csv", "hca.csv", "density_1.csv", "contrast_1.csv", "level0_band.csv"})
    EXPECT_TRUE(fs::exists(d + "/" + f)) << f;
}

TEST(CliTest, QuantileCurvesDoNotCross) {
  const std::string d = dir("quantiles");
  simulate(d);
  const Outcome r = run({"quantiles", "--u", "0.05,0.30,0.50,0.70,0.95", "--grid", "101", "--out", d});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(body(d + "/quantiles.json")["non_crossing"].get<bool>());
  const auto rows = read_numeric_csv(d + "/quantiles.csv");
  ASSERT_EQ(rows.size(), 101u);
  for (const auto& row : rows) {
    ASSERT_EQ(row.size(), 6u);
    for (std::size_t c = 2; c < row.size(); ++c) EXPECT_LE(row[c - 1], row[c]);
  }
}

TEST(CliTest, EveryAnalysisRuns) {
  const std::string d = dir("analyses");
  simulate(d);
  const std::vector<std::vector<std::string>> cmds{
      {"fit", "--at", "2"},
      {"density", "--at", "2", "--grid", "101"},
      {"interval", "--at", "2", "--kind", "hdpi"},
      {"hca"},
      {"gof"},
      {"pim"},
      {"ovis"},
      {"sharpen", "--at", "2", "--weak-lo", "0", "--weak-hi", "4", "--s", "100"}};
  for (auto c : cmds) {
    c.push_back("--out");
    c.push_back(d);
    const Outcome r = run(c);
    EXPECT_EQ(r.code, 0) << c.front() << ": " << r.err;
    EXPECT_TRUE(fs::exists(d + "/" + c.front() + ".json")) << c.front();
  }
  // A saved model is reused by later commands.
  const Outcome r = run({"interval", "--model", d + "/model.json", "--at", "1", "--out", d});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST(CliTest, TreatmentAndGroupCommands) {
  const std::string d = dir("treat");
  simulate(d, "treatment", 400, 2);
  Outcome r = run({"dif", "--treatment", "z", "--out", d});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(d + "/dif.csv"));

  const std::string g = d + "/groups.csv";
  upm::write_csv(g, {"g", "y"}, {{0, 1, 0, 1, 2, 2}, {1, 2, 3, 4, 5, 6}});
  r = run({"ksample", "--data", g, "--group", "g", "--out", d});
  ASSERT_EQ(r.code, 0) << r.err;
  const json b = body(d + "/ksample.json");
  EXPECT_TRUE(fs::exists(d + "/ksample.csv"));
  EXPECT_FALSE(b.empty());
}

TEST(CliTest, ExitCodes) {
  const std::string d = dir("exits");
  simulate(d);
  Outcome r = run({"density", "--at", "2", "--bogus", "1", "--out", d});
  EXPECT_EQ(r.code, upm::cli::kExitUsage);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  EXPECT_EQ(run({"no-such-command"}).code, upm::cli::kExitUsage);
  EXPECT_EQ(run({}).code, upm::cli::kExitUsage);
  EXPECT_EQ(run({"fit", "--learner", "forest", "--out", d}).code, upm::cli::kExitUsage);
  EXPECT_EQ(run({"fit", "--data", d + "/missing.csv", "--out", d}).code, upm::cli::kExitData);
  EXPECT_EQ(run({"fit", "--response", "nope", "--out", d}).code, upm::cli::kExitData);
  r = run({"interval", "--at", "2", "--hdpi-grid", "3", "--hdpi-tolerance", "1e-12", "--out", d});
  EXPECT_EQ(r.code, upm::cli::kExitNumeric);
  EXPECT_NE(r.err.find("GridTooCoarse"), std::string::npos);
  EXPECT_EQ(run({"fit", "--help"}).code, upm::cli::kExitOk);
}

TEST(CliTest, ReportBodiesAreReproducible) {
  const std::string a = dir("repro_a");
  const std::string b = dir("repro_b");
  for (const auto& d : {a, b}) {
    simulate(d, "butterfly", 200, 3);
    ASSERT_EQ(run({"pipeline", "--at", "2", "--seed", "5", "--out", d}).code, 0);
  }
  const auto ra = upm::cli::read_report(a + "/pipeline.json");
  const auto rb = upm::cli::read_report(b + "/pipeline.json");
  EXPECT_NE(ra.header.find("generated"), std::string::npos);
  // The only difference between runs is the output path echoed in the config.
  json ja = json::parse(ra.body), jb = json::parse(rb.body);
  ja["config"].erase("out");
  jb["config"].erase("out");
  EXPECT_EQ(ja.dump(), jb.dump());
  // Same directory twice gives byte-identical bodies.
  ASSERT_EQ(run({"pipeline", "--at", "2", "--seed", "5", "--out", a}).code, 0);
  EXPECT_EQ(upm::cli::read_report(a + "/pipeline.json").body, ra.body);
}

TEST(CliTest, ConfigFileWithFlagOverride) {
  const std::string d = dir("config");
  simulate(d);
  const std::string cfg = d + "/run.cfg";
  std::ofstream(cfg) << "# defaults\nk = 25\nat = 1;2\n[interval]\nalpha = 0.2\n[fit]\nalpha = 0.9\n";
  Outcome r = run({"interval", "--config", cfg, "--out", d});
  ASSERT_EQ(r.code, 0) << r.err;
  json b = body(d + "/interval.json");
  EXPECT_EQ(b["config"]["k"], "25");
  EXPECT_EQ(b["config"]["alpha"], "0.2");
  EXPECT_EQ(b["queries"].size(), 2u);
  r = run({"interval", "--config", cfg, "--k", "9", "--out", d});
  ASSERT_EQ(r.code, 0) << r.err;
  b = body(d + "/interval.json");
  EXPECT_EQ(b["config"]["k"], "9");
  std::ofstream(d + "/bad.cfg") << "wiggle = 3\n";
  EXPECT_EQ(run({"interval", "--config", d + "/bad.cfg", "--at", "2", "--out", d}).code, upm::cli::kExitUsage);
  EXPECT_EQ(run({"interval", "--config", d + "/absent.cfg", "--at", "2", "--out", d}).code, upm::cli::kExitUsage);
}

TEST(CliTest, EnvironmentDefaults) {
  const std::string d = dir("env");
  ASSERT_EQ(setenv("UPM_OUTPUT_DIR", d.c_str(), 1), 0);
  Outcome r = run({"simulate", "location", "--n", "50", "--seed", "1"});
  unsetenv("UPM_OUTPUT_DIR");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(d + "/data.csv"));

  ASSERT_EQ(setenv("CI", "1", 1), 0);
  r = run({"simulate", "--out", d});
  const Outcome seeded = run({"simulate", "--seed", "3", "--out", d});
  unsetenv("CI");
  EXPECT_EQ(r.code, upm::cli::kExitUsage);
  EXPECT_NE(r.err.find("--seed"), std::string::npos);
  EXPECT_EQ(seeded.code, 0);
}
