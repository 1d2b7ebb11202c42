#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "stmod/cli.hpp"
#include "test_support.hpp"

using namespace stmod;
using stmod::testing::data_path;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

report::Json json_of(const Outcome& o) { return report::Json::parse(o.out); }

std::size_t count_of(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST(Cli, SolveFig3b) {
  const auto o = run({"solve", "--input", data_path("fig3b")});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto j = json_of(o);
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["graph"]["vertices"], 4);
  EXPECT_NEAR(j["meo"].get<double>(), 1.8, 1e-9);
  for (const auto& v : j["eta"]) EXPECT_NEAR(v.get<double>(), 0.6, 1e-9);
  EXPECT_EQ(j["homogeneous"], true);
  EXPECT_EQ(j["uniform"], false);
  EXPECT_FALSE(j["pmf"].empty());
}

TEST(Cli, NumbersCarryTwelveSignificantDigits) {
  const auto o = run({"solve", "--input", data_path("fig3a")});
  const auto j = json_of(o);
  EXPECT_EQ(j["meo"].get<double>(), 2.33333333333);
  EXPECT_NE(o.out.find("0.666666666667"), std::string::npos);
}

TEST(Cli, JsonIsDeterministicAndReparses) {
  const auto a = run({"deflate", "--input", data_path("fig1")});
  const auto b = run({"deflate", "--input", data_path("fig1")});
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(json_of(a).dump(2) + "\n", a.out);
}

TEST(Cli, DeflateFig1) {
  const auto o = run({"deflate", "--input", data_path("fig1")});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto j = json_of(o);
  ASSERT_EQ(j["levels"].size(), 3u);
  EXPECT_NEAR(j["levels"][0]["kappa"].get<double>(), 0.2, 1e-6);
  EXPECT_NEAR(j["levels"][1]["kappa"].get<double>(), 1.0 / 3.0, 1e-6);
  EXPECT_NEAR(j["levels"][2]["kappa"].get<double>(), 0.5, 1e-6);
  EXPECT_NEAR(j["meo"].get<double>(), 152.0 / 15.0, 1e-9);
  EXPECT_EQ(j["levels"][0]["cores"][0]["theta"]["num"], 5);
}

TEST(Cli, OracleHouseAllGreen) {
  const auto o = run({"oracle", "--input", data_path("house")});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto j = json_of(o);
  EXPECT_EQ(j["agree"], true);
  EXPECT_EQ(j["densest"]["vertex_sets"].size(), 2u);
  EXPECT_EQ(j["fair"].size(), 9u);
  for (const auto& c : j["checks"]) EXPECT_TRUE(c["passed"].get<bool>()) << c["name"];
}

TEST(Cli, OracleDisagreementExitsFour) {
  const auto o = run({"oracle", "--input", data_path("fig3c"), "--tol", "0.3"});
  EXPECT_EQ(o.code, 4);
  EXPECT_EQ(json_of(o)["agree"], false);
}

TEST(Cli, OracleCapIsAnInputError) {
  const auto o = run({"oracle", "--input", data_path("k5"), "--cap", "10"});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("125"), std::string::npos);
}

TEST(Cli, PartitionFig3a) {
  const auto o = run({"partition", "--input", data_path("fig3a")});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto j = json_of(o);
  EXPECT_EQ(j["partition"]["weight"]["num"], 1);
  EXPECT_EQ(j["partition"]["blocks"].size(), 2u);
}

TEST(Cli, SampleIsSeeded) {
  const std::vector<std::string> args{"sample", "--input", data_path("fig3b"), "--seed", "5", "--count", "20"};
  const auto a = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, run(args).out);
  EXPECT_EQ(json_of(a)["samples"].size(), 20u);
  const auto other = run({"sample", "--input", data_path("fig3b"), "--seed", "6", "--count", "20"});
  EXPECT_NE(a.out, other.out);
}

TEST(Cli, TextFormatReportsTiming) {
  const auto o = run({"solve", "--input", data_path("fig3a"), "--format", "text"});
  ASSERT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("elapsed:"), std::string::npos);
  EXPECT_NE(o.out.find("meo:  2.3333333333"), std::string::npos);
  EXPECT_EQ(run({"solve", "--input", data_path("fig3a")}).out.find("elapsed"), std::string::npos);
}

TEST(Cli, ExportDotBuckets) {
  const auto b = run({"export-dot", "--input", data_path("fig3b")});
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(count_of(b.out, "// bucket"), 1u);
  EXPECT_EQ(count_of(b.out, "label=\"0.6000\""), 5u);

  const auto a = run({"export-dot", "--input", data_path("fig3a")});
  EXPECT_EQ(count_of(a.out, "// bucket"), 2u);
  EXPECT_EQ(count_of(a.out, "label=\"1.0000\""), 1u);
  EXPECT_EQ(count_of(a.out, "label=\"0.6667\""), 3u);

  const auto f = run({"export-dot", "--input", data_path("fig1")});
  EXPECT_EQ(count_of(f.out, "// bucket"), 3u);
  EXPECT_EQ(count_of(f.out, "style=solid"), 45u);
  EXPECT_EQ(count_of(f.out, "style=dashed"), 30u);
  EXPECT_EQ(count_of(f.out, "style=dotted"), 20u);
  EXPECT_EQ(f.out, run({"export-dot", "--input", data_path("fig1")}).out);

  const auto h = run({"export-dot", "--input", data_path("fig1"), "--hierarchy"});
  EXPECT_EQ(count_of(h.out, "// bucket"), 3u);
}

TEST(Cli, WritesToOutFile) {
  const auto path = (std::filesystem::temp_directory_path() / "stmod_cli_test.json").string();
  const auto o = run({"solve", "--input", data_path("fig3b"), "--out", path});
  ASSERT_EQ(o.code, 0);
  EXPECT_TRUE(o.out.empty());
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  EXPECT_EQ(buf.str(), run({"solve", "--input", data_path("fig3b")}).out);
  std::remove(path.c_str());
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"solve", "--input", "/nonexistent/graph.txt"}).code, 2);
  EXPECT_EQ(run({"solve", "--input", data_path("fig3b"), "--bogus"}).code, 2);
  EXPECT_EQ(run({"solve"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate", "--input", data_path("fig3b")}).code, 2);
  EXPECT_EQ(run({"solve", "--input", data_path("fig3b"), "--format", "xml"}).code, 2);
  EXPECT_EQ(run({"solve", "--input", data_path("fig3b"), "--max-iter", "1"}).code, 3);
  EXPECT_EQ(run({"solve", "--input", data_path("fig3b"), "--out", "/nonexistent/dir/x.json"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, DisconnectedInputIsAnInputError) {
  const auto path = (std::filesystem::temp_directory_path() / "stmod_disconnected.txt").string();
  {
    std::ofstream f(path);
    f << "a b\nc d\n";
  }
  const auto o = run({"solve", "--input", path});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("not connected"), std::string::npos);
  std::remove(path.c_str());
}

TEST(Cli, SolveThenOracleAgreeOnCorpus) {
  for (const auto& name : stmod::testing::corpus_names()) {
    const auto g = stmod::testing::load_fixture(name);
    if (count_trees(g) > kOracleTreeCap) continue;
    EXPECT_EQ(run({"solve", "--input", data_path(name)}).code, 0) << name;
    EXPECT_EQ(run({"oracle", "--input", data_path(name)}).code, 0) << name;
  }
}
