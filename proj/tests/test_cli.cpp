#include <gtest/gtest.h>
#include <sys/wait.h>

#include <unistd.h>

#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

struct Outcome {
  int code;
  std::string output;
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string(CSTAR_APPROX_BIN) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe) != nullptr) out += buf;
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string problem(const std::string& name) { return std::string(CSTAR_PROBLEMS_DIR) + "/" + name; }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("cstar_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }
  static void spit(const std::string& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

  fs::path dir_;
};

TEST_F(Cli, SolveMatchesOffDiagonalSumAndVerifies) {
  const Outcome solve = run("solve --input " + problem("diagonal_m2x3.json") + " --output " + path("r.json"));
  ASSERT_EQ(solve.code, 0) << solve.output;
  const Json r = Json::parse(slurp(path("r.json")));
  const double expected = std::abs(std::complex<double>(0.5, -0.25)) + std::abs(std::complex<double>(-1.5, 0.5)) +
                          2.0 + 0.75 + 0.5 + std::abs(std::complex<double>(0.25, 0.25));
  EXPECT_NEAR(r["distance"].get<double>(), expected, 1e-6);
  EXPECT_TRUE(r["converged"].get<bool>());
  const Outcome verify = run("verify --input " + problem("diagonal_m2x3.json") + " --report " + path("r.json"));
  EXPECT_EQ(verify.code, 0) << verify.output;
  EXPECT_NE(verify.output.find("lower_bound:"), std::string::npos);
  EXPECT_NE(verify.output.find("gap:"), std::string::npos);
}

TEST_F(Cli, OperatorSampleIsLargestOffDiagonal) {
  const Outcome solve = run("solve --input " + problem("diagonal_m2x3_operator.json") + " --output " + path("r.json"));
  ASSERT_EQ(solve.code, 0) << solve.output;
  EXPECT_NEAR(Json::parse(slurp(path("r.json")))["distance"].get<double>(), 2.0, 1e-6);
}

TEST_F(Cli, VerifyRejectsTamperedReports) {
  ASSERT_EQ(run("solve --input " + problem("diagonal_m2x3.json") + " --output " + path("r.json")).code, 0);
  const Json good = Json::parse(slurp(path("r.json")));

  Json zeroed = good;
  for (Json& block : zeroed["certificate"]["witness"])
    for (Json& entry : block) entry = Json::array({0.0, 0.0});
  spit(path("zeroed.json"), zeroed.dump());
  EXPECT_EQ(run("verify --input " + problem("diagonal_m2x3.json") + " --report " + path("zeroed.json")).code, 3);

  Json edited = good;
  edited["distance"] = good["distance"].get<double>() + 0.1;
  spit(path("edited.json"), edited.dump());
  EXPECT_EQ(run("verify --input " + problem("diagonal_m2x3.json") + " --report " + path("edited.json")).code, 3);

  Json lowered = good;
  lowered["distance"] = good["distance"].get<double>() - 0.1;
  spit(path("lowered.json"), lowered.dump());
  EXPECT_EQ(run("verify --input " + problem("diagonal_m2x3.json") + " --report " + path("lowered.json")).code, 3);
}

TEST_F(Cli, VerifyNeedsMatchingDigest) {
  ASSERT_EQ(run("solve --input " + problem("diagonal_m2x3.json") + " --output " + path("r.json")).code, 0);
  spit(path("p.json"), slurp(problem("diagonal_m2x3.json")) + " ");
  const Outcome v = run("verify --input " + path("p.json") + " --report " + path("r.json"));
  EXPECT_EQ(v.code, 1);
  EXPECT_NE(v.output.find("input_digest"), std::string::npos);
}

TEST_F(Cli, VerifyIsSelfContained) {
  fs::copy_file(problem("diagonal_m2x3.json"), path("p.json"));
  ASSERT_EQ(run("solve --input " + path("p.json") + " --output " + path("r.json")).code, 0);
  for (const auto& entry : fs::directory_iterator(dir_)) {
    const std::string name = entry.path().filename().string();
    EXPECT_TRUE(name == "p.json" || name == "r.json") << name;
  }
  EXPECT_EQ(run("verify --input " + path("p.json") + " --report " + path("r.json")).code, 0);
}

TEST_F(Cli, MalformedBlockSizeCitesSignature) {
  const Outcome r = run("solve --input " + problem("malformed_block_size.json") + " --output " + path("r.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("signature"), std::string::npos) << r.output;
  EXPECT_FALSE(fs::exists(path("r.json")));
}

TEST_F(Cli, BadArgumentsAndMissingFiles) {
  EXPECT_EQ(run("solve --input " + problem("diagonal_m2x3.json")).code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  EXPECT_EQ(run("solve --input " + path("nope.json") + " --output " + path("r.json")).code, 1);
  spit(path("broken.json"), "{\"schema_version\": ");
  EXPECT_EQ(run("solve --input " + path("broken.json") + " --output " + path("r.json")).code, 1);
  EXPECT_EQ(run("solve --input " + problem("diagonal_m2x3.json") + " --output " + path("r.json") + " --tol -1").code, 1);
}

TEST_F(Cli, DeterministicReports) {
  ASSERT_EQ(run("solve --input " + problem("diagonal_m2x3.json") + " --output " + path("a.json") + " --seed 3").code, 0);
  ASSERT_EQ(run("solve --input " + problem("diagonal_m2x3.json") + " --output " + path("b.json") + " --seed 3").code, 0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
}

TEST_F(Cli, NonConvergenceStillWritesReport) {
  Json p = Json::parse(slurp(problem("diagonal_m2x3.json")));
  p["options"] = {{"max_iter", 1}, {"restarts", 0}, {"tol", 1e-14}};
  spit(path("p.json"), p.dump());
  const Outcome r = run("solve --input " + path("p.json") + " --output " + path("r.json"));
  EXPECT_EQ(r.code, 2) << r.output;
  EXPECT_FALSE(Json::parse(slurp(path("r.json")))["converged"].get<bool>());
}

TEST_F(Cli, TraceClassTailEnclosesTwo) {
  const Outcome r =
      run("solve --input " + problem("backward_shift_trace.json") + " --output " + path("r.json") + " --tol 1e-3");
  ASSERT_EQ(r.code, 0) << r.output;
  const Json rep = Json::parse(slurp(path("r.json")));
  const double lo = rep["tail"]["interval"]["lo"].get<double>();
  const double hi = rep["tail"]["interval"]["hi"].get<double>();
  EXPECT_LE(lo, 2.0);
  EXPECT_GE(hi, 2.0);
  EXPECT_LE(hi - lo, 2e-3);
  EXPECT_EQ(run("verify --input " + problem("backward_shift_trace.json") + " --report " + path("r.json")).code, 0);
}

TEST_F(Cli, DeltaOnShiftBlock) {
  const Outcome r = run("delta --input " + problem("shift_block_operator.json"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("delta: 1\n"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("distance: 2"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("strict: true"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("delta < distance"), std::string::npos) << r.output;
}

TEST_F(Cli, DeltaCompactHarmonicUnbounded) {
  const Outcome compact = run("delta --input " + problem("compact_tail.json"));
  EXPECT_EQ(compact.code, 0);
  EXPECT_NE(compact.output.find("delta: 0\n"), std::string::npos) << compact.output;
  const Outcome harmonic = run("delta --input " + problem("harmonic_weights.json"));
  EXPECT_EQ(harmonic.code, 0);
  EXPECT_NE(harmonic.output.find("delta: 2\n"), std::string::npos) << harmonic.output;
  EXPECT_EQ(run("delta --input " + problem("unbounded_weights.json")).code, 4);
  EXPECT_EQ(run("delta --input " + problem("diagonal_m2x3.json")).code, 1);
}

}  // namespace
