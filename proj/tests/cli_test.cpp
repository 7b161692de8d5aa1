#include "agielo/cli.hpp"

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "json.hpp"
#include "test_support.hpp"

namespace agielo {
namespace {

using testing::TempDir;
using testing::slurp;
using testing::spit;

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation run(std::vector<std::string> args) {
  args.insert(args.begin(), "agielo");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code =
      run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const char* kSmallCsv =
    "case_id,alpha,beta,gamma\n"
    "q1,1,0,1\n"
    "q2,0,0,1\n";

std::string imagenet_run() {
  nlohmann::ordered_json doc;
  doc["metadata"] = {{"scoring", "identity"}};
  doc["players"] = {
      {{"id", "best"}, {"category", "agent"}, {"mu", 2035.0}, {"sigma", 40.0}},
      {{"id", "other"}, {"category", "agent"}, {"mu", 1700.0}, {"sigma", 40.0}},
      {{"id", "hardest"}, {"category", "test_case"}, {"mu", 2389.7},
       {"sigma", 90.0}},
      {{"id", "easy"}, {"category", "test_case"}, {"mu", 1200.0},
       {"sigma", 90.0}}};
  return doc.dump();
}

TEST(CliRateTest, WritesRunAndIsDeterministic) {
  TempDir dir("rate");
  spit(dir.file("m.csv"), kSmallCsv);
  const auto first = run({"rate", dir.file("m.csv"), "-o", dir.file("a.json"),
                          "--seed", "7"});
  ASSERT_EQ(first.code, 0) << first.err;
  EXPECT_EQ(first.out, "agents=3 cases=2 matches=6 seed=7\n");
  const auto second = run({"rate", dir.file("m.csv"), "-o", dir.file("b.json"),
                           "--seed", "7"});
  ASSERT_EQ(second.code, 0);
  EXPECT_EQ(slurp(dir.file("a.json")), slurp(dir.file("b.json")));

  const auto doc = nlohmann::json::parse(slurp(dir.file("a.json")));
  EXPECT_EQ(doc["players"].size(), 5u);
  EXPECT_EQ(doc["metadata"]["generator"], "mt19937_64+fisher-yates/v1");
  EXPECT_EQ(doc["metadata"]["seed"], 7);
}

TEST(CliRateTest, ConfigFileAndOverrides) {
  TempDir dir("rate_cfg");
  spit(dir.file("m.csv"), kSmallCsv);
  spit(dir.file("run.cfg"), "# comment\nseed = 3\nvariant = paper-literal\n");
  auto r = run({"rate", dir.file("m.csv"), "-c", dir.file("run.cfg"), "-o",
                dir.file("r.json"), "--seed", "11"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(slurp(dir.file("r.json")));
  EXPECT_EQ(doc["metadata"]["seed"], 11);
  EXPECT_EQ(doc["metadata"]["variant"], "paper-literal");
}

TEST(CliRateTest, ErrorCodes) {
  TempDir dir("rate_err");
  spit(dir.file("dup.csv"), "case_id,a,b\nq1,1,0\nq1,0,1\n");
  auto r = run({"rate", dir.file("dup.csv"), "-o", dir.file("x.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("agielo: error[2]:"), std::string::npos);
  EXPECT_NE(r.err.find("q1"), std::string::npos);

  r = run({"rate", dir.file("missing.csv"), "-o", dir.file("x.json")});
  EXPECT_EQ(r.code, 2);

  spit(dir.file("m.csv"), kSmallCsv);
  spit(dir.file("bad.cfg"), "seeds=4\n");
  r = run({"rate", dir.file("m.csv"), "-c", dir.file("bad.cfg"), "-o",
           dir.file("x.json")});
  EXPECT_EQ(r.code, 1);
  r = run({"rate", dir.file("m.csv"), "-o", dir.file("x.json"), "--variant",
           "bogus"});
  EXPECT_EQ(r.code, 1);
  r = run({"rate", dir.file("m.csv"), "-o", dir.file("x.json"), "--passes",
           "0"});
  EXPECT_EQ(r.code, 1);
  r = run({"rate", dir.file("m.csv")});
  EXPECT_EQ(r.code, 1);
  r = run({});
  EXPECT_EQ(r.code, 1);
  r = run({"frobnicate"});
  EXPECT_EQ(r.code, 1);

  spit(dir.file("range.csv"), "case_id,a,b\nq1,1.5,0\nq2,0,1\n");
  r = run({"rate", dir.file("range.csv"), "-o", dir.file("x.json")});
  EXPECT_EQ(r.code, 2);
}

TEST(CliAnalyzeTest, GapReportForInjectedRatings) {
  TempDir dir("analyze");
  spit(dir.file("run.json"), imagenet_run());
  const auto r = run({"analyze", dir.file("run.json"), "-o",
                      dir.file("report.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("r_t_max=2389.7 r_a_max=2035.0"), std::string::npos);
  EXPECT_NE(r.out.find("gap@0.5=354.7"), std::string::npos);
  EXPECT_NE(r.out.find("gap@0.9=736.4"), std::string::npos);
  EXPECT_NE(r.out.find("gap@0.99="), std::string::npos);
  EXPECT_NE(r.err.find("reliability report skipped"), std::string::npos);

  const auto doc = nlohmann::json::parse(slurp(dir.file("report.json")));
  const auto& gap = doc["competency_gap"];
  EXPECT_EQ(gap["hardest_case"], "hardest");
  EXPECT_EQ(gap["best_agent"], "best");
  EXPECT_NEAR(gap["expected_metric"].get<double>(), 0.115, 0.001);
  const double want[] = {354.7, 736.4, 1152.9};
  ASSERT_EQ(gap["gaps"].size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(gap["gaps"][i]["gap"].get<double>(), want[i], 0.15);
  }
  EXPECT_FALSE(doc.contains("reliability"));
  EXPECT_FALSE(slurp(dir.file("report_percentile.csv")).empty());
  EXPECT_FALSE(slurp(dir.file("report_histogram.csv")).empty());
}

TEST(CliAnalyzeTest, ThresholdHandling) {
  TempDir dir("analyze_t");
  spit(dir.file("run.json"), imagenet_run());
  auto r = run({"analyze", dir.file("run.json"), "-o", dir.file("r.json"),
                "-t", "0.5"});
  ASSERT_EQ(r.code, 0);
  const auto doc = nlohmann::json::parse(slurp(dir.file("r.json")));
  EXPECT_EQ(doc["competency_gap"]["gaps"].size(), 1u);

  r = run({"analyze", dir.file("run.json"), "-o", dir.file("r.json"), "-t",
           "1.0"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("error[3]"), std::string::npos);
  r = run({"analyze", dir.file("run.json"), "-o", dir.file("r.json"), "-t",
           "0"});
  EXPECT_EQ(r.code, 3);
  r = run({"analyze", dir.file("run.json"), "-o", dir.file("r.json"), "-t",
           "high"});
  EXPECT_EQ(r.code, 1);

  spit(dir.file("broken.json"), "{\"players\": [");
  r = run({"analyze", dir.file("broken.json"), "-o", dir.file("r.json")});
  EXPECT_EQ(r.code, 2);
}

TEST(CliAnalyzeTest, ReliabilityFromRecordedInput) {
  TempDir dir("analyze_rel");
  spit(dir.file("m.csv"), kSmallCsv);
  ASSERT_EQ(run({"rate", dir.file("m.csv"), "-o", dir.file("run.json")}).code,
            0);
  const auto r = run({"analyze", dir.file("run.json"), "-o",
                      dir.file("rep.json"), "--bin-width", "50"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("rho_t="), std::string::npos);
  const auto doc = nlohmann::json::parse(slurp(dir.file("rep.json")));
  EXPECT_EQ(doc["reliability"]["n_match"], 6);
  EXPECT_EQ(doc["reliability"]["bin_width"], 50.0);
}

TEST(CliSimulateTest, WritesContractFiles) {
  TempDir dir("sim");
  const auto r = run({"simulate", "--agents", "6", "--cases", "200", "--mode",
                      "continuous", "--seed", "5", "--recover", "-o",
                      dir.file("out")});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"matrix.csv", "truth.json", "run.json",
                        "recovery.json"}) {
    EXPECT_FALSE(slurp(dir.file(std::string("out/") + f)).empty()) << f;
  }
  const auto rec = nlohmann::json::parse(slurp(dir.file("out/recovery.json")));
  EXPECT_EQ(rec["mode"], "continuous");
  EXPECT_GE(rec["rho_agents"].get<double>(), 0.999);
  EXPECT_TRUE(rec["consistency"].contains("rho_t"));
  const auto truth = nlohmann::json::parse(slurp(dir.file("out/truth.json")));
  EXPECT_EQ(truth.size(), 206u);
}

TEST(CliSimulateTest, RejectsBadArguments) {
  TempDir dir("sim_bad");
  EXPECT_EQ(run({"simulate", "--agents", "1", "-o", dir.file("o")}).code, 1);
  EXPECT_EQ(run({"simulate", "--cases", "1", "-o", dir.file("o")}).code, 1);
  EXPECT_EQ(run({"simulate", "--mode", "ternary", "-o", dir.file("o")}).code,
            1);
  EXPECT_EQ(run({"simulate", "--prior-sigma", "-3", "-o", dir.file("o")}).code,
            1);
}

TEST(CliPredictTest, ExpectedMetric) {
  TempDir dir("predict");
  spit(dir.file("run.json"), imagenet_run());
  auto r = run({"predict", dir.file("run.json"), "--agent", "best", "--case",
                "hardest"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "predicted_metric=0.114882 expected_score=0.114882\n");
  r = run({"predict", dir.file("run.json"), "--agent", "best", "--rating",
           "2035"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "predicted_metric=0.500000 expected_score=0.500000\n");
  r = run({"predict", dir.file("run.json"), "--agent", "best", "--case",
           "hardest", "--scoring", "affine:0.01:0"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("predicted_metric=11.488"), std::string::npos);

  EXPECT_EQ(run({"predict", dir.file("run.json"), "--agent", "nobody",
                 "--case", "hardest"}).code,
            2);
  EXPECT_EQ(run({"predict", dir.file("run.json"), "--agent", "best"}).code, 1);
}

// Random byte-level mutations of a valid matrix must end in a defined exit
// code, never a crash or an uncaught exception.
TEST(CliFuzzTest, MutatedMatricesExitCleanly) {
  TempDir dir("fuzz");
  const std::string base =
      "case_id,m1,\"m,2\",m3\n"
      "c1,0.25,1,0\n"
      "\"c 2\",0.5,,0.75\r\n"
      "c3,1,0.125,0.5\n";
  const std::string alphabet = ",\"\n\r0123456789.-e+xnaif ";
  std::mt19937_64 rng(2024);
  const std::string in = dir.file("f.csv");
  const std::string outp = dir.file("f.json");
  int counts[4] = {0, 0, 0, 0};
  for (int i = 0; i < 10000; ++i) {
    std::string text = base;
    const int edits = 1 + static_cast<int>(rng() % 4);
    for (int e = 0; e < edits && !text.empty(); ++e) {
      const std::size_t pos = rng() % text.size();
      const char ch = alphabet[rng() % alphabet.size()];
      switch (rng() % 3) {
        case 0: text[pos] = ch; break;
        case 1: text.erase(pos, 1); break;
        default: text.insert(pos, 1, ch); break;
      }
    }
    spit(in, text);
    const auto r = run({"rate", in, "-o", outp});
    ASSERT_GE(r.code, 0) << text;
    ASSERT_LE(r.code, 3) << text;
    ++counts[r.code];
    if (r.code != 0) {
      ASSERT_EQ(r.err.rfind("agielo: error[", 0), 0u) << r.err;
    }
  }
  EXPECT_GT(counts[0], 0);
  EXPECT_GT(counts[2], 0);
}

}  // namespace
}  // namespace agielo
