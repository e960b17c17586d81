#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(ETPSIM_CLI_PATH) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string data(const char* name) { return std::string(ETPSIM_TEST_DATA_DIR) + "/" + name; }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("etpsim_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string out(const char* sub = "out") const { return (dir_ / sub).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("fringe --scan fig9").code, 2);
  EXPECT_EQ(run("fringe --format xml").code, 2);
}

TEST_F(Cli, FringeWritesDatasetAndModel) {
  const CliRun r = run("fringe --out " + out() + " --seed 3");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("model r 0.359"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("fit r "), std::string::npos);
  const std::string csv = slurp(out() + "/dataset.csv");
  EXPECT_EQ(csv.rfind("repetition,angle_deg,counts,sigma\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 5 * 25);
  EXPECT_EQ(slurp(out() + "/model.csv").rfind("angle_deg,expected_counts\n", 0), 0u);
}

TEST_F(Cli, FringeIsByteIdenticalForASeed) {
  ASSERT_EQ(run("fringe --out " + out("a") + " --seed 20050101 --scan fig2c").code, 0);
  ASSERT_EQ(run("fringe --out " + out("b") + " --seed 20050101 --scan fig2c").code, 0);
  ASSERT_EQ(run("fringe --out " + out("c") + " --seed 20050102 --scan fig2c").code, 0);
  EXPECT_EQ(slurp(out("a") + "/dataset.csv"), slurp(out("b") + "/dataset.csv"));
  EXPECT_NE(slurp(out("a") + "/dataset.csv"), slurp(out("c") + "/dataset.csv"));
}

TEST_F(Cli, FringeJsonFormat) {
  ASSERT_EQ(run("fringe --format json --reps 2 --grid-step-deg 45 --out " + out()).code, 0);
  const json d = json::parse(slurp(out() + "/dataset.json"));
  EXPECT_EQ(d["records"].size(), 10u);
  const json m = json::parse(slurp(out() + "/model.json"));
  EXPECT_EQ(m["scan"], "fig2a");
  EXPECT_EQ(m["points"].size(), 5u);
}

TEST_F(Cli, PureEtpModelVanishesAt45) {
  ASSERT_EQ(run("fringe --alpha 1 --c0 300 --out " + out()).code, 0);
  EXPECT_NE(slurp(out() + "/model.csv").find("\n45,0\n"), std::string::npos);
}

TEST_F(Cli, PureDoubleEopGivesHalf) {
  const CliRun r = run("estimate --beta 1 --c0 100000 --grid-step-deg 45 --out " + out());
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(slurp(out() + "/report.json"));
  EXPECT_NEAR(j["ratio"]["r"].get<double>(), 0.5, 0.01);
}

TEST_F(Cli, EstimateOnExtremaFixture) {
  const CliRun r = run("estimate " + data("extrema_200_72.csv") + " --out " + out());
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(slurp(out() + "/report.json"));
  EXPECT_NEAR(j["ratio"]["r"].get<double>(), 0.36, 1e-12);
  EXPECT_EQ(j["ratio"]["n_experiments"], 5);
  EXPECT_EQ(j["criterion"]["verdict"], "etp_indicated");
  EXPECT_NEAR(j["alpha_gamma0"]["alpha"].get<double>(), 0.28 / 0.76, 1e-12);
  EXPECT_FALSE(j["alpha_gamma0"]["out_of_model"].get<bool>());
  EXPECT_EQ(j["datasets"][0]["records"], 25);
}

TEST_F(Cli, EstimateWithNoiseCorrection) {
  const CliRun r = run("estimate --input " + data("extrema_200_72.csv") + " --gamma-fixed 0.2 --out " + out());
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(slurp(out() + "/report.json"));
  ASSERT_EQ(j["noise_corrected"].size(), 1u);
  EXPECT_NEAR(j["noise_corrected"][0]["alpha"].get<double>(), 1.056 / 2.28, 1e-12);
  EXPECT_NEAR(j["noise_corrected"][0]["alpha"].get<double>(), 0.46, 0.005);
}

TEST_F(Cli, EstimateInfeasibleNoiseExitsFour) {
  const CliRun r = run("estimate " + data("extrema_200_72.csv") + " --gamma-fixed 0.9 --out " + out());
  EXPECT_EQ(r.code, 4);
  const json j = json::parse(slurp(out() + "/report.json"));
  EXPECT_TRUE(j["noise_corrected"][0].contains("feasible_r"));
}

TEST_F(Cli, FlatCountsAreOutOfModel) {
  const CliRun r = run("estimate " + data("flat_100.csv") + " --out " + out());
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(slurp(out() + "/report.json"));
  EXPECT_DOUBLE_EQ(j["ratio"]["r"].get<double>(), 1.0);
  EXPECT_EQ(j["criterion"]["verdict"], "not_indicated");
  EXPECT_EQ(j["alpha_gamma0"]["alpha"], 0.0);
  EXPECT_TRUE(j["alpha_gamma0"]["out_of_model"].get<bool>());
  bool clamp_warning = false;
  for (const auto& w : j["warnings"]) clamp_warning |= w.get<std::string>().find("clamped") != std::string::npos;
  EXPECT_TRUE(clamp_warning);
}

TEST_F(Cli, InputErrorsMapToExitCodes) {
  EXPECT_EQ(run("estimate " + data("malformed.csv") + " --out " + out()).code, 2);
  EXPECT_EQ(run("estimate " + data("does_not_exist.csv") + " --out " + out()).code, 3);
  EXPECT_EQ(run("fringe --config " + data("unknown_key.json") + " --out " + out()).code, 2);
  EXPECT_EQ(run("fringe --config " + data("no_such_config.json") + " --out " + out()).code, 3);
  EXPECT_EQ(run("fringe --alpha 0.5 --beta 0.2 --out " + out()).code, 2);
  EXPECT_EQ(run("fringe --out /proc/etpsim_cannot_create").code, 3);
}

TEST_F(Cli, ConfigFileAndOverrides) {
  const CliRun r = run("estimate --config " + data("config.json") + " --out " + out());
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(slurp(out() + "/report.json"));
  EXPECT_EQ(j["datasets"][0]["scan"], "fig2b");
  EXPECT_EQ(j["datasets"][0]["repetitions"], 3);
  EXPECT_EQ(j["noise_corrected"].size(), 2u);

  ASSERT_EQ(run("fringe --config " + data("config.json") + " --reps 1 --out " + out("o")).code, 0);
  const std::string csv = slurp(out("o") + "/dataset.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 9);
}

TEST_F(Cli, ValidatePassesAndDetectsFault) {
  const CliRun ok = run("validate --cases 100");
  EXPECT_EQ(ok.code, 0) << ok.out;
  EXPECT_EQ(ok.out.find("FAIL"), std::string::npos);
  const CliRun bad = run("validate --cases 100 --inject-fault perturbed_lift");
  EXPECT_EQ(bad.code, 5);
  EXPECT_NE(bad.out.find("FAIL  lift_unitarity"), std::string::npos) << bad.out;
  EXPECT_EQ(run("validate --cases 100 --inject-fault perturbed_lift --tolerance 1").code, 0);
  EXPECT_EQ(run("validate --cases 100 --tolerance 0").code, 5);
}

TEST_F(Cli, BellReportsEverySource) {
  const CliRun r = run("bell --family analyzer --restarts 2 --out " + out());
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(slurp(out() + "/bell.json"));
  ASSERT_EQ(j["results"].size(), 3u);
  EXPECT_EQ(j["results"][0]["source"], "etp");
  EXPECT_GT(j["results"][0]["best_value"].get<double>(), 2.5);
  EXPECT_EQ(j["results"][2]["status"], "within_classical_bound");
  EXPECT_TRUE(j["results"][1]["settings"].contains("b_prime"));
}
