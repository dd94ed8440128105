// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "common.hpp"

using namespace holoscale;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("holoscale_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

RunOptions quiet_to(const fs::path& out) {
  RunOptions o;
  o.out_dir = out;
  o.quiet = true;
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Copy of a few corpus configs with freshly blessed goldens.
fs::path small_corpus(const std::string& name) {
  const fs::path dir = scratch(name);
  for (const char* cfg : {"identity.cdl", "bidisc.cdl", "cex1.cdl"})
    fs::copy_file(fs::path(HOLOSCALE_CORPUS) / cfg, dir / cfg);
  VerifyOptions vo;
  vo.out_dir = dir / "out";
  vo.bless = true;
  std::ostringstream log;
  verify(dir, vo, log);
  return dir;
}

int cli(const std::string& args) {
  const std::string cmd = std::string("\"") + HOLOSCALE_CLI + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Run, BidiscVerdicts) {
  const auto out = scratch("bidisc");
  const auto res = run(std::string(HOLOSCALE_CORPUS) + "/bidisc.cdl", quiet_to(out));
  ASSERT_EQ(res.exit_code, 0) << res.report.dump(2);
  const auto& v = res.report["verdicts"];
  EXPECT_EQ(v["case"], "AccumulationVariety");
  EXPECT_EQ(v["normality"], "Bounded");
  EXPECT_EQ(v["limit"]["verdict"], "Cauchy");
  EXPECT_EQ(v["scaling_mode"], "Frankel");
  EXPECT_EQ(res.report["version"], kVersion);
  EXPECT_TRUE(fs::exists(out / "report.json"));
  EXPECT_TRUE(fs::exists(out / "timings.json"));
  EXPECT_TRUE(fs::exists(out / "series" / "diagnostics.csv"));
  EXPECT_TRUE(fs::exists(out / "series" / "cloud_last.txt"));
  // One per-j record for every index up to j_max, no truncation.
  const auto& per_j = res.report["per_j"];
  ASSERT_EQ(per_j.size(), 12u);
  for (std::size_t k = 0; k < per_j.size(); ++k) EXPECT_EQ(per_j[k]["j"], 1 + static_cast<int>(k));
}

TEST(Run, Cex1IsUnbounded) {
  const auto res = run(std::string(HOLOSCALE_CORPUS) + "/cex1.cdl", quiet_to(scratch("cex1")));
  ASSERT_EQ(res.exit_code, 0);
  EXPECT_EQ(res.report["verdicts"]["normality"], "Unbounded");
  EXPECT_EQ(res.report["verdicts"]["case"], "AccumulationPoint");
}

TEST(Run, JmaxOverrideAndForcedMode) {
  RunOptions o = quiet_to(scratch("override"));
  o.jmax = 10;
  o.mode = ModeChoice::Variety;
  const auto res = run(std::string(HOLOSCALE_CORPUS) + "/bidisc.cdl", o);
  ASSERT_EQ(res.exit_code, 0);
  EXPECT_EQ(res.report["per_j"].back()["j"], 10);
  EXPECT_EQ(res.report["verdicts"]["scaling_mode"], "VarietyEigen");
}

TEST(Run, MissingFileIsConfigError) {
  const auto res = run("/nonexistent/missing.cdl", quiet_to(scratch("missing")));
  EXPECT_EQ(res.exit_code, 2);
  EXPECT_EQ(res.report["error"]["kind"], "ConfigError");
  EXPECT_EQ(cli("run /nonexistent/missing.cdl --quiet --out " + scratch("missing_cli").string()), 2);
}

TEST(Run, SyntaxErrorIsConfigError) {
  const auto dir = scratch("syntax");
  std::ofstream(dir / "bad.cdl") << "domain { rho = abs(z)^2 +; }\n";
  const auto res = run((dir / "bad.cdl").string(), quiet_to(dir / "out"));
  EXPECT_EQ(res.exit_code, 2);
  EXPECT_EQ(res.report["error"]["kind"], "SyntaxError");
  EXPECT_EQ(res.report["error"]["line"], 1);
}

TEST(Run, NumericalFailureExitsThree) {
  const auto dir = scratch("numeric");
  // det = 2^(-6j) drops below the degeneracy threshold inside the window.
  std::ofstream(dir / "crush.cdl") << "domain { ineq = abs(z) - 1; ineq = abs(w) - 1; }\n"
                                      "family { f = (1 - a)^3*z; g = (1 - a)^3*w; alpha(j) = 1 - 2^(-j); limit = 1; }\n"
                                      "experiment { q = (0, 0); }\n";
  const auto res = run((dir / "crush.cdl").string(), quiet_to(dir / "out"));
  EXPECT_EQ(res.exit_code, 3);
  EXPECT_EQ(res.report["error"]["kind"], "DegenerateJacobian");
  EXPECT_FALSE(res.report["error"]["operation"].get<std::string>().empty());
}

TEST(Run, DeterministicReports) {
  const auto a = scratch("det_a"), b = scratch("det_b");
  const std::string cfg = std::string(HOLOSCALE_CORPUS) + "/bidisc.cdl";
  run(cfg, quiet_to(a));
  run(cfg, quiet_to(b));
  EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));
  EXPECT_EQ(slurp(a / "series" / "diagnostics.csv"), slurp(b / "series" / "diagnostics.csv"));
  EXPECT_EQ(slurp(a / "series" / "cloud_last.txt"), slurp(b / "series" / "cloud_last.txt"));
}

TEST(Verify, PristineCorpusPasses) {
  const auto dir = small_corpus("pristine");
  VerifyOptions vo;
  vo.out_dir = dir / "check";
  std::ostringstream log;
  const auto vr = verify(dir, vo, log);
  EXPECT_EQ(vr.exit_code, 0) << log.str();
  EXPECT_EQ(vr.passed, 3);
  EXPECT_EQ(vr.failed, 0);
  EXPECT_NE(log.str().find("3 passed, 0 failed"), std::string::npos);
}

TEST(Verify, PerturbedGoldenFailsAndNamesTheField) {
  const auto dir = small_corpus("perturbed");
  const fs::path g = dir / "golden" / "bidisc.json";
  auto golden = json::parse(slurp(g));
  auto& l2 = golden["per_j"][6]["lambda2"]["re"];
  l2 = l2.get<double>() * 1.1;
  std::ofstream(g) << golden.dump(2) << '\n';
  VerifyOptions vo;
  vo.out_dir = dir / "check";
  std::ostringstream log;
  const auto vr = verify(dir, vo, log);
  EXPECT_EQ(vr.exit_code, 1);
  EXPECT_EQ(vr.failed, 1);
  EXPECT_NE(log.str().find("FAIL bidisc"), std::string::npos) << log.str();
  EXPECT_NE(log.str().find("per_j[6].lambda2.re"), std::string::npos) << log.str();
}

TEST(Verify, OtherSeedStillPasses) {
  const auto dir = small_corpus("seed");
  VerifyOptions vo;
  vo.out_dir = dir / "check";
  vo.seed = 12345;
  std::ostringstream log;
  const auto vr = verify(dir, vo, log);
  EXPECT_EQ(vr.exit_code, 0) << log.str();
}

TEST(Verify, EmptyDirectoryIsCorpusMissing) {
  const auto dir = scratch("empty");
  VerifyOptions vo;
  vo.out_dir = dir / "out";
  std::ostringstream log;
  const auto vr = verify(dir, vo, log);
  EXPECT_EQ(vr.exit_code, 2);
  EXPECT_NE(log.str().find("CorpusMissing"), std::string::npos);
  EXPECT_EQ(cli("verify " + dir.string() + " --out " + (dir / "cli").string()), 2);
}

TEST(Cli, EnvironmentSetsDefaultOutput) {
  const auto dir = scratch("env");
  const std::string cmd = "HOLOSCALE_OUT=\"" + dir.string() + "\" \"" + HOLOSCALE_CLI + "\" run \"" +
                          HOLOSCALE_CORPUS + "/identity.cdl\" --quiet >/dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(dir / "report.json"));
}

TEST(Cli, BadFlagIsUsageError) {
  EXPECT_EQ(cli("run --mode sideways x.cdl"), 2);
  EXPECT_EQ(cli(""), 2);
}
