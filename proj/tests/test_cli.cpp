#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <set>
#include <cstdio>
#include <string>

#include "json.hpp"

using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
  json report() const { return json::parse(out); }
};

std::string data(const std::string& rel) { return std::string(DIVCQ_DATA_DIR) + "/" + rel; }

Run run(const std::string& args) {
  static int counter = 0;
  std::string err_path = ::testing::TempDir() + "divcq_cli_err_" + std::to_string(getpid()) + "_" + std::to_string(counter++);
  std::string cmd = std::string(DIVCQ_CLI_PATH) + " " + args + " 2>" + err_path;
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  if (FILE* e = std::fopen(err_path.c_str(), "r")) {
    while ((n = fread(buf.data(), 1, buf.size(), e)) > 0) r.err.append(buf.data(), n);
    std::fclose(e);
  }
  std::remove(err_path.c_str());
  return r;
}

bool contains_row(const json& rows, std::vector<std::string> row) {
  for (const auto& r : rows)
    if (r.get<std::vector<std::string>>() == row) return true;
  return false;
}

}  // namespace

TEST(CliEval, PathQueryOverD1) {
  auto r = run("eval --data " + data("d1") + " --query " + data("queries/q1.cq") + " --dump");
  ASSERT_EQ(r.code, 0) << r.err;
  auto res = r.report()["result"];
  EXPECT_EQ(res["answer_count"], 4);
  EXPECT_TRUE(contains_row(res["answers"], {"a", "a"}));
  EXPECT_TRUE(contains_row(res["answers"], {"b", "b"}));
  EXPECT_EQ(res["evaluation"], "yannakakis");
}

TEST(CliEval, EmptyDatabase) {
  auto r = run("eval --data " + data("empty") + " --query-text 'Q(x) <- R(x,y).'");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.report()["result"]["answer_count"], 0);
}

TEST(CliEval, MalformedQueryReportsPosition) {
  auto r = run("eval --data " + data("d1") + " --query-text 'Q(x) <- R(x,,y).'");
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(r.out.empty());
  EXPECT_NE(r.err.find("1:13"), std::string::npos) << r.err;
}

TEST(CliEval, InputErrorsExitTwo) {
  EXPECT_EQ(run("eval --data " + data("missing") + " --query-text 'Q(x) <- R(x,y).'").code, 2);
  EXPECT_EQ(run("eval --data " + data("d1") + " --query-text 'Q(x) <- S(x,y).'").code, 2);
  EXPECT_EQ(run("eval --data " + data("d1")).code, 2);
  EXPECT_EQ(run("no-such-command").code, 2);
}

TEST(CliDiversify, ExactIdentityOverD1) {
  auto r = run("diversify --data " + data("d1") + " --query " + data("queries/identity.cq") +
               " --volume elem -k 3 --mode exact");
  ASSERT_EQ(r.code, 0) << r.err;
  auto d = r.report()["result"]["diverse"];
  EXPECT_EQ(d["total"], "2");
  EXPECT_EQ(d["optimal"], true);
  EXPECT_EQ(d["selected"].size(), 3u);
}

TEST(CliDiversify, KZeroSelectsNothing) {
  for (std::string mode : {"greedy", "exact", "greedy-combined"}) {
    auto r = run("diversify --data " + data("d1") + " --query " + data("queries/identity.cq") +
                 " --volume pos -k 0 --mode " + mode);
    ASSERT_EQ(r.code, 0) << mode << ": " << r.err;
    auto d = r.report()["result"]["diverse"];
    EXPECT_TRUE(d["selected"].empty()) << mode;
    EXPECT_EQ(d["total"], "0") << mode;
  }
}

TEST(CliDiversify, GreedyWithinRatioOfExactOnRandomFixture) {
  for (int k = 1; k <= 4; ++k) {
    std::string base = "diversify --data " + data("random_small") + " --query " + data("queries/path2.cq") +
                       " --volume pos -k " + std::to_string(k);
    auto g = run(base + " --mode greedy"), e = run(base + " --mode exact");
    ASSERT_EQ(g.code, 0) << g.err;
    ASSERT_EQ(e.code, 0) << e.err;
    double greedy = g.report()["result"]["diverse"]["total_approx"];
    double opt = e.report()["result"]["diverse"]["total_approx"];
    EXPECT_GE(greedy, (1.0 - 1.0 / std::exp(1.0)) * opt - 1e-9) << "k=" << k;
    EXPECT_LE(greedy, opt);
  }
}

TEST(CliDiversify, CombinedTropicalMatchesWeightedExample) {
  auto r = run("diversify --data " + data("d3") + " --query " + data("queries/identity.cq") +
               " --volume pos-w --measure weighted:" + data("d3/weights_pos.csv") +
               " -k 2 --mode greedy-combined");
  ASSERT_EQ(r.code, 0) << r.err;
  auto res = r.report()["result"];
  EXPECT_EQ(res["engine"], "tropical");
  EXPECT_EQ(res["diverse"]["total"], "5");
}

TEST(CliDiversify, CombinedAgreesWithMaterializedGreedy) {
  std::string base = "diversify --data " + data("random_small") + " --query " + data("queries/path2.cq") +
                     " --volume pos -k 3";
  auto m = run(base), c = run(base + " --mode greedy-combined"), n = run(base + " --mode greedy-combined --engine naive");
  ASSERT_EQ(m.code, 0) << m.err;
  ASSERT_EQ(c.code, 0) << c.err;
  ASSERT_EQ(n.code, 0) << n.err;
  auto gm = m.report()["result"]["diverse"]["gains"];
  EXPECT_EQ(c.report()["result"]["diverse"]["gains"], gm);
  EXPECT_EQ(n.report()["result"]["diverse"]["gains"], gm);
}

TEST(CliDiversify, ProvenanceNeedsSelfJoinFreeForCombined) {
  auto r = run("diversify --data " + data("d1") + " --query " + data("queries/q1.cq") +
               " --volume provenance -k 2 --mode greedy-combined");
  EXPECT_EQ(r.code, 2);
  auto ok = run("diversify --data " + data("d1") + " --query " + data("queries/q1.cq") +
                " --volume provenance -k 1 --mode exact");
  ASSERT_EQ(ok.code, 0) << ok.err;
  EXPECT_EQ(ok.report()["result"]["diverse"]["total"], "3");
}

TEST(CliDiversify, ExactModeCapExitsTwo) {
  auto r = run("diversify --data " + data("random_small") + " --query " + data("queries/path2.cq") +
               " --volume pos -k 4 --mode exact --max-subsets 10");
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
}

TEST(CliCompare, FiveTupleAnomalies) {
  auto r = run("compare --data " + data("triples") + " --query " + data("queries/identity5.cq") + " -k 2");
  ASSERT_EQ(r.code, 0) << r.err;
  auto a = r.report()["result"]["anomalies"];
  EXPECT_EQ(a["sum_marginal_increase"]["marginal_on_larger"], "26");
  EXPECT_EQ(a["sum_marginal_increase"]["marginal_on_smaller"], "16");
  EXPECT_EQ(a["min_not_monotone"]["subset_value"], "5");
  EXPECT_EQ(a["min_not_monotone"]["superset_value"], "3");
}

TEST(CliCompare, SingleAnswerScoresOnlyTheVolume) {
  auto r = run("compare --data " + data("d1") + " --query-text 'Q(x) <- R(x,x).' --volume elem -k 3");
  ASSERT_EQ(r.code, 0) << r.err;
  auto report = r.report();
  for (const auto& s : report["result"]["sets"]) {
    EXPECT_EQ(s["scores"]["sum"], "0");
    EXPECT_EQ(s["scores"]["min"], "0");
    EXPECT_EQ(s["scores"]["weitzman"], "0");
    EXPECT_EQ(s["scores"]["volume"], "1");
  }
}

TEST(CliCompare, VolumeOfGreedySetGrowsWithK) {
  std::optional<double> prev;
  for (int k = 1; k <= 5; ++k) {
    auto r = run("compare --data " + data("random_small") + " --query " + data("queries/path2.cq") +
                 " --volume pos -k " + std::to_string(k));
    ASSERT_EQ(r.code, 0) << r.err;
    auto s = r.report()["result"]["sets"][0];
    ASSERT_EQ(s["greedy_for"], "volume");
    double v = std::stod(s["scores"]["volume"].get<std::string>());
    if (prev) {
      EXPECT_GE(v, *prev);
    }
    prev = v;
  }
}

TEST(CliCompare, MatrixDistanceOverElements) {
  auto r = run("compare --data " + data("d1") + " --query-text 'Q(x) <- R(x,y).' --distance matrix:" +
               data("table1_metric.csv") + " -k 2");
  ASSERT_EQ(r.code, 0) << r.err;
  // a and b are 2 apart in the matrix
  auto report = r.report();
  for (const auto& s : report["result"]["sets"]) EXPECT_EQ(s["scores"]["weitzman"], "2");
}

TEST(CliConvert, UltrametricTreePasses) {
  auto r = run("convert --ultrametric " + data("sample_ultrametric.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  auto res = r.report()["result"];
  EXPECT_EQ(res["check"]["status"], "PASS");
  EXPECT_NE(r.err.find("delta_V = delta_W + r on all subsets <= size 4: PASS"), std::string::npos) << r.err;
  EXPECT_EQ(res["radius"], "5");
}

TEST(CliConvert, SingleLambdaEntryGivesOneSharedBall) {
  std::string path = ::testing::TempDir() + "divcq_single_lambda.json";
  FILE* f = std::fopen(path.c_str(), "w");
  ASSERT_TRUE(f);
  std::fputs(R"({"universe":["p","q","r"],"lambda":[{"set":["p","q"],"weight":"7/2"}]})", f);
  std::fclose(f);
  auto r = run("convert --multiattr " + path);
  std::remove(path.c_str());
  ASSERT_EQ(r.code, 0) << r.err;
  auto res = r.report()["result"];
  EXPECT_EQ(res["check"]["status"], "PASS");
  std::set<std::string> points;
  for (const auto& b : res["volume"]["balls"])
    for (const auto& p : b["ball"]) points.insert(p["point"].get<std::string>());
  EXPECT_EQ(points.size(), 1u);
}

TEST(CliConvert, ElemOverD3RoundTrips) {
  auto r = run("convert --volume-dump --data " + data("d3") + " --volume elem");
  ASSERT_EQ(r.code, 0) << r.err;
  auto res = r.report()["result"];
  EXPECT_EQ(res["check"]["status"], "PASS");
  EXPECT_EQ(res["multiattribute"]["universe"].size(), 2u);
}

TEST(CliConvert, RejectsAmbiguousSources) {
  EXPECT_EQ(run("convert").code, 2);
  EXPECT_EQ(run("convert --multiattr " + data("sample_multiattr.json") + " --ultrametric " +
                data("sample_ultrametric.json")).code,
            2);
}

TEST(CliDeterminism, SameSeedSamePayload) {
  std::string args = "diversify --data " + data("random_small") + " --query " + data("queries/path2.cq") +
                     " --volume pos -k 3 --seed 7";
  auto a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.report()["result"].dump(), b.report()["result"].dump());
  EXPECT_EQ(a.report()["inputs"].dump(), b.report()["inputs"].dump());
  EXPECT_EQ(a.report()["seed"], 7);
  auto x = run("bench --vertices 30 --edges 80 --length 3 -k 3 --seed 3");
  auto y = run("bench --vertices 30 --edges 80 --length 3 -k 3 --seed 3");
  ASSERT_EQ(x.code, 0) << x.err;
  EXPECT_EQ(x.report()["result"].dump(), y.report()["result"].dump());
}

TEST(CliDeterminism, BallEstimatesIndependentOfThreads) {
  std::string pts = ::testing::TempDir() + "divcq_points";
  std::string mk = "mkdir -p " + pts + " && printf 'X/2\\n' > " + pts + "/schema.txt && printf '0,0\\n1,0\\n5,5\\n' > " + pts + "/X.csv";
  ASSERT_EQ(std::system(mk.c_str()), 0);
  std::string args = "diversify --data " + pts + " --query-text 'Q(x,y) <- X(x,y).' --volume ball:r=1 -k 2 --samples 20000";
  auto one = run("--seed 5 " + args), many = run("--seed 5 " + args);
  setenv("DIVERSE_CQ_THREADS", "1", 1);
  auto single = run("--seed 5 " + args);
  unsetenv("DIVERSE_CQ_THREADS");
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(one.report()["result"].dump(), many.report()["result"].dump());
  EXPECT_EQ(one.report()["result"].dump(), single.report()["result"].dump());
}
