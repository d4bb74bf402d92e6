#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "seqrate/error.hpp"
#include "seqrate/serialization.hpp"
#include "support/random_instances.hpp"

namespace seqrate {
namespace {

namespace fs = std::filesystem;
using testing::Rng;

const fs::path kData = SEQRATE_TEST_DATA_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const char* name) { return (kData / name).string(); }

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / name; }

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  return rows;
}

double parse(const std::string& s) { return s == "inf" ? kInf : std::strtod(s.c_str(), nullptr); }

TEST(Cli, GoldenExitCodes) {
  std::ifstream in(kData / "golden.json");
  const Json cases = Json::parse(in);
  ASSERT_EQ(cases.size(), 10u);
  for (const auto& c : cases) {
    const auto file = c["file"].get<std::string>();
    const auto result = run_cli({c["command"].get<std::string>(), data(file.c_str())});
    EXPECT_EQ(result.code, c["exit"].get<int>()) << file << "\n" << result.err;
    if (result.code == 2) {
      EXPECT_TRUE(result.out.empty());
      EXPECT_NE(result.err.find("error"), std::string::npos);
    } else {
      EXPECT_TRUE(Json::accept(result.out)) << file;
    }
  }
}

TEST(Cli, LossyVerdictAtBoundary) {
  const auto r = run_cli({"check-lossy", data("leakage_instance_at_boundary.json")});
  ASSERT_EQ(r.code, 0);
  const Json v = Json::parse(r.out);
  EXPECT_TRUE(v["achievable"].get<bool>());
  EXPECT_NEAR(v["margin"].get<double>(), 0.0, 1e-12);
}

TEST(Cli, EffectiveFunctionOfThirdWorkedExample) {
  const auto r = run_cli({"effective", data("worked_example_g3.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json doc = Json::parse(r.out);
  EXPECT_DOUBLE_EQ(doc["shift"].get<double>(), 1.0);
  const auto f = cumulative_from_json(Json{{"knots", doc["knots"]}}, Role::rate);
  std::vector<double> alphas;
  for (const auto& k : f.knots()) alphas.push_back(k.alpha);
  EXPECT_EQ(alphas, (std::vector<double>{0, 0.25, 0.5, 1}));
}

TEST(Cli, UnknownFieldIsNamed) {
  const auto r = run_cli({"validate", data("unknown_field.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("budget"), std::string::npos);
}

TEST(Cli, InvariantIsNamedInDiagnostic) {
  const auto r = run_cli({"validate", data("invalid_jump_at_origin.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("zero-initial-value"), std::string::npos);
}

TEST(Cli, UsageErrorsAreInvalidInput) {
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
  EXPECT_EQ(run_cli({"check-lossy"}).code, 2);
  EXPECT_EQ(run_cli({"check-lossy", data("missing.json")}).code, 2);
  EXPECT_EQ(run_cli({"emit-figure", "figure9"}).code, 2);
  EXPECT_EQ(run_cli({"schedule", data("lossless_boundary.json")}).code, 2);
}

TEST(Cli, OracleFlagAndOverrides) {
  const auto r = run_cli({"check-lossy", data("leakage_instance_at_boundary.json"), "--oracle"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json v = Json::parse(r.out);
  EXPECT_NEAR(v["oracle"]["min_distortion"].get<double>(), 0.8, 1e-12);

  const auto o = run_cli({"oracle", data("leakage_instance_too_strict.json"), "--k", "2", "--grid-step", "0.1"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(Json::parse(o.out)["grid_step"].get<double>(), 0.1);
}

TEST(Cli, SchedulePlan) {
  const auto r = run_cli({"schedule", data("leakage_instance_at_boundary.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json plan = Json::parse(r.out);
  EXPECT_NEAR(plan["predicted_avg_distortion"].get<double>(), 0.8, 1e-12);
  ASSERT_EQ(plan["blocks"].size(), 2u);
  EXPECT_EQ(plan["blocks"][0]["sent"][0]["desc_block"].get<int>(), 1);
  EXPECT_NEAR(plan["blocks"][0]["sent"][0]["rate"].get<double>(), 0.2, 1e-12);
}

TEST(Cli, CsvMatchesInProcessEvaluation) {
  for (const char* name : {"worked_example_g3.json", "log_loss_gated.json", "ternary_matrix.json"}) {
    const auto csv = temp_file(std::string("seqrate_") + name + ".csv");
    const auto r = run_cli({"min-distortion", data(name), "--csv", csv.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(data(name));
    const auto problem = cli::parse_problem(Json::parse(in));
    const auto curve = cli::problem_curve(problem);
    const auto eff = effective_crdf(problem.crdf, problem.cldf);
    const auto env = concave_envelope(eff);
    const auto rows = read_csv(csv);
    ASSERT_GT(rows.size(), 2u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"alpha", "G", "L", "G_eff", "envelope", "slope", "D_of_slope"}));
    for (std::size_t i = 1; i < rows.size(); ++i) {
      ASSERT_EQ(rows[i].size(), 7u);
      const double a = parse(rows[i][0]);
      EXPECT_EQ(parse(rows[i][1]), problem.crdf(a));
      EXPECT_EQ(parse(rows[i][2]), problem.cldf(a));
      EXPECT_EQ(parse(rows[i][3]), eff(a));
      EXPECT_EQ(parse(rows[i][4]), env(a));
      EXPECT_EQ(parse(rows[i][5]), env.slope(a, Side::right));
      EXPECT_EQ(parse(rows[i][6]), curve.distortion_at_rate(std::max(0.0, env.slope(a, Side::right))));
    }
    // Every knot of the inputs appears as a row.
    for (const auto& k : problem.crdf.knots()) {
      bool found = false;
      for (std::size_t i = 1; i < rows.size(); ++i) found = found || parse(rows[i][0]) == k.alpha;
      EXPECT_TRUE(found) << k.alpha;
    }
    fs::remove(csv);
  }
}

TEST(Cli, FigureTables) {
  const auto ex1 = run_cli({"emit-figure", "example1"});
  ASSERT_EQ(ex1.code, 0) << ex1.err;
  std::istringstream lines(ex1.out);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "alpha,G_eff,upper_bound");
  // Worked example G3 with dbar 0.5: G_eff(1) = 1, bound = min{alpha + 0.5, 1}.
  for (std::string line; std::getline(lines, line);) {
    const double a = std::strtod(line.c_str(), nullptr);
    const double bound = std::strtod(line.substr(line.rfind(',') + 1).c_str(), nullptr);
    EXPECT_NEAR(bound, std::min(a + 0.5, 1.0), 1e-12);
  }
  EXPECT_EQ(run_cli({"emit-figure", "example2"}).code, 0);
  const auto thm = run_cli({"emit-figure", "theorem2", data("worked_example_g3.json")});
  ASSERT_EQ(thm.code, 0);
  EXPECT_EQ(thm.out.substr(0, thm.out.find('\n')), "alpha,G,L,G_eff,envelope,slope,D_of_slope");
}

TEST(Serialization, RoundTripIsKnotExact) {
  Rng rng(71);
  for (int t = 0; t < 300; ++t) {
    const bool leak = testing::coin(rng, 0.5);
    const auto f = leak ? testing::random_leakage_function(rng) : testing::random_rate_function(rng, 3.0);
    const std::string text = to_json(f).dump();
    const auto back = cumulative_from_json(Json::parse(text), leak ? Role::leakage : Role::rate);
    EXPECT_EQ(back, f) << text;
  }
}

TEST(Serialization, NumberTokens) {
  EXPECT_EQ(number_from_json(Json("inf"), "x"), kInf);
  EXPECT_EQ(number_from_json(Json("0.125"), "x"), 0.125);
  EXPECT_EQ(number_to_json(kInf), Json("inf"));
  EXPECT_THROW(number_from_json(Json("abc"), "x"), InvalidInput);
  EXPECT_THROW(number_from_json(Json(true), "x"), InvalidInput);
  EXPECT_THROW(cumulative_from_json(Json("unconstrained"), Role::rate), InvalidInput);
}

TEST(Serialization, DistortionKinds) {
  EXPECT_EQ(distortion_from_json(Json::parse(R"({"kind":"hamming"})"), 3).matrix().size(), 3u);
  EXPECT_EQ(distortion_from_json(Json::parse(R"({"kind":"erasure"})"), 2).kind(), DistortionKind::erasure);
  const auto m = distortion_from_json(Json::parse(R"({"kind":"matrix","values":[[0,"inf",1],["inf",0,1]]})"), 2);
  EXPECT_EQ(m.matrix()[0][1], kInf);
  EXPECT_THROW(distortion_from_json(Json::parse(R"({"kind":"matrix","values":[[0,1]]})"), 2), InvalidInput);
  EXPECT_THROW(distortion_from_json(Json::parse(R"({"kind":"hamming","values":[[0]]})"), 1), InvalidInput);
  EXPECT_THROW(distortion_from_json(Json::parse(R"({"kind":"cosine"})"), 2), InvalidInput);
}

}  // namespace
}  // namespace seqrate
