#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string output;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(STABLEFIELD_CLI_PATH) + " " + args + " 2>&1";
  RunResult r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, p)) r.output += buf;
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string config(const std::string& name) {
  return std::string(STABLEFIELD_CONFIG_DIR) + "/" + name + ".cfg";
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("stablefield_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST(Cli, ClassifyCatalog) {
  const std::vector<std::pair<std::string, std::string>> cases{
      {"mma", "ErgodicWeaklyMixing"},
      {"subgauss", "CompletelyNonErgodic"},
      {"markov_mixed", "MixedErgodicity"},
      {"markov_finite", "CompletelyNonErgodic"},
      {"finite_rotation", "CompletelyNonErgodic"}};
  for (const auto& [name, verdict] : cases) {
    const auto out = scratch("classify_" + name);
    const auto r = run("classify " + config(name) + " --out " + out.string());
    ASSERT_EQ(r.code, 0) << name << "\n" << r.output;
    const auto j = read_json(out / "classify.json");
    EXPECT_EQ(j["verdict"], verdict) << name;
    EXPECT_TRUE(fs::exists(out / "run.log"));
  }
}

TEST(Cli, ExitCodes) {
  const auto out = scratch("codes");
  EXPECT_EQ(run("classify /nonexistent.cfg --out " + out.string()).code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("classify " + config("mma") + " --threads zero").code, 2);
  const auto transient = run("classify " + config("markov_transient") + " --out " + out.string());
  EXPECT_EQ(transient.code, 3);
  EXPECT_NE(transient.output.find("transient"), std::string::npos) << transient.output;
  EXPECT_EQ(run("simulate " + config("full_support_violation") + " --out " + out.string()).code, 3);
}

TEST(Cli, VerifyPassesAndNamesFailures) {
  const auto ok = scratch("verify_ok");
  const auto r = run("verify " + config("finite_rotation") + " --out " + ok.string());
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("PASS minimality_annotation"), std::string::npos);
  const auto j = read_json(ok / "verify.json");
  EXPECT_FALSE(j.empty());

  const auto bad = scratch("verify_bad");
  const auto c = run("verify " + config("corrupted") + " --out " + bad.string());
  EXPECT_EQ(c.code, 3);
  EXPECT_NE(c.output.find("FAIL action_axioms"), std::string::npos) << c.output;
  EXPECT_TRUE(fs::exists(bad / "verify.json"));
}

TEST(Cli, SimulateIsIndependentOfThreadCount) {
  const auto a = scratch("sim_a"), b = scratch("sim_b");
  ASSERT_EQ(run("simulate " + config("markov_mixed") + " --threads 1 --out " + a.string()).code, 0);
  ASSERT_EQ(run("simulate " + config("markov_mixed") + " --threads 8 --out " + b.string()).code, 0);
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().filename() == "run.log") continue;
    EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path().filename();
    ++compared;
  }
  EXPECT_EQ(compared, 8u);
}

TEST(Cli, SeedOverrideChangesOutput) {
  const auto a = scratch("seed_a"), b = scratch("seed_b");
  ASSERT_EQ(run("simulate " + config("mma") + " --out " + a.string()).code, 0);
  ASSERT_EQ(run("simulate " + config("mma") + " --seed 7 --out " + b.string()).code, 0);
  EXPECT_NE(slurp(a / "realization_0.csv"), slurp(b / "realization_0.csv"));
  EXPECT_EQ(read_json(b / "realization_0.json")["seed"], 7);
}
