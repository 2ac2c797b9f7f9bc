#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "gpstlab/cli.hpp"
#include "test_support.hpp"

using namespace gpstlab;
using namespace gpstlab::testing;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

const std::string kParams = std::string(GPSTLAB_SOURCE_DIR) + "/params/p863.json";

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("gpstlab_test_" + std::to_string(::getpid()) + "_" + name)).string();
}

std::string write_spec(const std::string& name, const ParamSpec& s) {
  const std::string path = temp_path(name);
  cli::write_file(path, params_to_json(s).dump(2));
  return path;
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST(Cli, DemoReproducesPublishedFailure) {
  const Result r = run_cli({"demo", "--params", kParams});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "verdict: Key not found"));
  EXPECT_TRUE(contains(r.out, "golden transcript: match"));
  EXPECT_TRUE(contains(r.out, "iteration 0: theta = 7"));
  EXPECT_TRUE(contains(r.out, "iteration 1: theta = 5"));
  EXPECT_TRUE(contains(r.out, "j = 117"));
  EXPECT_TRUE(contains(r.out, "E_A model: matches"));
  EXPECT_FALSE(contains(r.out, "differs"));
}

TEST(Cli, DemoBuiltinAndDeterministic) {
  const Result a = run_cli({"demo"});
  const Result b = run_cli({"demo"});
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, DemoOtherBobKey) {
  const Result r = run_cli({"demo", "--b2", "2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "verdict: RecoveredKey(1, 10)"));
  EXPECT_FALSE(contains(r.out, "golden transcript"));
}

TEST(Cli, DemoJson) {
  const std::string path = temp_path("demo.json");
  const Result r = run_cli({"demo", "--params", kParams, "--json", path});
  EXPECT_EQ(r.code, 0);
  const auto j = ordered_json::parse(read_text_file(path));
  EXPECT_EQ(j["params_ref"], kParams);
  EXPECT_EQ(j["verdict"], "KeyNotFound");
  EXPECT_EQ(j["iterations"].size(), 2u);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"params_ref", "b1", "b2", "iterations", "tail", "verdict"}));
  const std::string first = read_text_file(path);
  EXPECT_EQ(run_cli({"demo", "--params", kParams, "--json", path}).code, 0);
  EXPECT_EQ(read_text_file(path), first);
  std::filesystem::remove(path);
}

TEST(Cli, AttackExitCodes) {
  Result r = run_cli({"attack", "--params", kParams, "--alpha", "10", "--b1", "1", "--b2", "6"});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(contains(r.out, "Key not found"));
  r = run_cli({"attack", "--alpha", "0", "--b1", "1", "--b2", "1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "RecoveredKey(1, 0)"));
  r = run_cli({"attack", "--alpha", "10", "--b1", "1", "--b2", "2"});
  EXPECT_EQ(r.code, 0);
  r = run_cli({"attack", "--alpha", "5", "--b1", "0", "--b2", "0"});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.err, "kernel generator has wrong order"));
  r = run_cli({"attack", "--alpha", "5"});
  EXPECT_EQ(r.code, 2);
  r = run_cli({"attack", "--alpha", "x", "--b1", "1", "--b2", "1"});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, SearchTable) {
  const Result r = run_cli({"search", "--params", kParams, "--workers", "4"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "alpha,b1,b2,verdict,first_failed_i,cond_i,cond_ii,cond_iii,collision_count\n"));
  EXPECT_TRUE(contains(r.out, "\n10,1,6,KeyNotFound,1,true,true,true,"));
  EXPECT_TRUE(contains(r.out, "rows: 864,"));
  EXPECT_TRUE(contains(r.out, "unexplained: 0"));
  std::istringstream lines(r.out);
  std::string line;
  while (std::getline(lines, line)) {
    if (contains(line, ",KeyNotFound,")) {
      EXPECT_TRUE(contains(line, ",true,true,true,")) << line;
    }
  }
}

TEST(Cli, SearchCsvFileAndRanges) {
  const std::string path = temp_path("sweep.csv");
  const Result r = run_cli({"search", "--alpha-range", "8..12", "--b-range", "5..7", "--csv", path});
  EXPECT_EQ(r.code, 0);
  const std::string csv = read_text_file(path);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 4 * 2);
  EXPECT_TRUE(contains(csv, "10,1,6,KeyNotFound,1,"));
  std::filesystem::remove(path);
  EXPECT_EQ(run_cli({"search", "--alpha-range", "12..8"}).code, 2);
  EXPECT_EQ(run_cli({"search", "--alpha-range", "0..40"}).code, 2);
  EXPECT_EQ(run_cli({"search", "--b-range", "nonsense"}).code, 2);
}

TEST(Cli, Validate) {
  Result r = run_cli({"validate", "--params", kParams});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "PASS supersingular"));
  EXPECT_FALSE(contains(r.out, "FAIL"));

  ParamSpec s = p863_spec();
  s.f = 2;
  const std::string nonprime = write_spec("nonprime.json", s);
  r = run_cli({"validate", "--params", nonprime});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.out, "FAIL p = 2^n 3^m f - 1 prime"));
  EXPECT_EQ(run_cli({"demo", "--params", nonprime}).code, 2);

  s = p863_spec();
  const Point Q2 = scalar_mul(2, example_params().QA);
  s.QA = {Q2.x().c0(), Q2.x().c1(), Q2.y().c0(), Q2.y().c1()};
  const std::string doubled = write_spec("doubled.json", s);
  r = run_cli({"validate", "--params", doubled});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.out, "FAIL order QA  (order 2^4)"));
  EXPECT_TRUE(contains(r.out, "FAIL basis PA,QA"));
  r = run_cli({"attack", "--params", doubled, "--alpha", "1", "--b1", "1", "--b2", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.err, "validation failed: basis PA,QA"));

  const std::string broken = temp_path("broken.json");
  cli::write_file(broken, "{\n  \"n\": 5,\n  oops\n}\n");
  r = run_cli({"validate", "--params", broken});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.err, "line 3"));
  EXPECT_EQ(run_cli({"validate"}).code, 2);
  for (const auto& p : {nonprime, doubled, broken}) std::filesystem::remove(p);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}
