#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int exit_code;
  std::string out;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kSchema = R"([
  {"name": "a", "values": ["x", "y"]},
  {"name": "b", "values": ["p", "q", "r"]},
  {"name": "c", "values": ["0", "1"]}
])";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dpstream_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    std::ofstream(dir_ / "schema.json") << kSchema;
    std::ofstream csv(dir_ / "data.csv");
    csv << "a,b,c\n";
    const char* b[] = {"p", "q", "r", "p"};
    for (int i = 0; i < 80; ++i) {
      csv << (i % 3 ? "x" : "y") << "," << b[i % 4] << "," << (i % 5 ? "0" : "1")
          << "\n";
    }
  }
  void TearDown() override {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }

  json config() const {
    return json{{"name", "toy"},
                {"dataset", "data.csv"},
                {"schema", "schema.json"},
                {"stream", {{"variant", "randomized_batch"}, {"batch_size", 10}}},
                {"epsilons", {0.5, 1}},
                {"seeds", {0, 1}},
                {"k", 2},
                {"output_dir", "out"}};
  }

  fs::path write_config(const json& j, const std::string& name = "config.json") {
    std::ofstream(dir_ / name) << j.dump();
    return dir_ / name;
  }

  Result run(const std::string& args) const {
    const std::string cmd = std::string(DPSTREAM_CLI_PATH) + " " + args + " > " +
                            (dir_ / "stdout.txt").string() + " 2> " +
                            (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1,
            slurp(dir_ / "stdout.txt")};
  }

  fs::path dir_;
};

TEST_F(CliTest, RunWritesTheFullGrid) {
  const auto cfg = write_config(config());
  const auto r = run("run --config " + cfg.string() + " --jobs 3");
  ASSERT_EQ(r.exit_code, 0) << slurp(dir_ / "stderr.txt");
  EXPECT_EQ(json::parse(r.out)["runs"].size(), 8u);
  for (const char* algo : {"baseline", "main"}) {
    for (const char* eps : {"eps0.5", "eps1"}) {
      for (const char* seed : {"seed0", "seed1"}) {
        const fs::path d = dir_ / "out/toy" / algo / eps / seed;
        EXPECT_TRUE(fs::exists(d / "metrics.csv")) << d;
        EXPECT_TRUE(fs::exists(d / "summary.json")) << d;
        EXPECT_TRUE(fs::exists(d / "meta.json")) << d;
      }
    }
  }
  const auto csv = slurp(dir_ / "out/toy/main/eps1/seed0/metrics.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,AvgWE,MaxWE,AvgRelWE,MaxRelWE");
}

TEST_F(CliTest, ZeroNoiseOverrideIsReproducible) {
  auto j = config();
  j["epsilons"] = {1};
  j["seeds"] = {3};
  const auto cfg = write_config(j);
  ASSERT_EQ(run("run --config " + cfg.string() + " --noise zero").exit_code, 0);
  const auto first = slurp(dir_ / "out/toy/main/eps1/seed3/metrics.csv");
  ASSERT_EQ(run("run --config " + cfg.string() + " --noise zero --jobs 2").exit_code,
            0);
  EXPECT_EQ(first, slurp(dir_ / "out/toy/main/eps1/seed3/metrics.csv"));
  const auto meta = json::parse(slurp(dir_ / "out/toy/main/eps1/seed3/meta.json"));
  EXPECT_EQ(meta["noise"], "zero");
}

TEST_F(CliTest, FailedTripleGivesNonZeroExit) {
  auto j = config();
  j["epsilons"] = {1};
  j["seeds"] = {0};
  const auto cfg = write_config(j);
  fs::create_directories(dir_ / "out/toy");
  std::ofstream(dir_ / "out/toy/main") << "blocker";
  const auto r = run("run --config " + cfg.string());
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(json::parse(r.out)["failed"], 1);
}

TEST_F(CliTest, Validate) {
  const auto cfg = write_config(config());
  const auto r = run("validate --config " + cfg.string());
  ASSERT_EQ(r.exit_code, 0);
  const auto v = json::parse(r.out);
  EXPECT_EQ(v["rows"], 80);
  EXPECT_EQ(v["steps"], 8);
  EXPECT_EQ(v["triples"], 8);
  EXPECT_FALSE(fs::exists(dir_ / "out"));
}

TEST_F(CliTest, BadConfigsAreRejected) {
  auto j = config();
  j["epsilons"] = {-1};
  auto cfg = write_config(j, "neg.json");
  EXPECT_EQ(run("validate --config " + cfg.string()).exit_code, 2);
  EXPECT_NE(slurp(dir_ / "stderr.txt").find("epsilon"), std::string::npos);
  EXPECT_EQ(run("run --config " + cfg.string()).exit_code, 2);

  j = config();
  j["dataset"] = "missing.csv";
  cfg = write_config(j, "missing.json");
  EXPECT_EQ(run("validate --config " + cfg.string()).exit_code, 2);

  EXPECT_NE(run("run --config " + (dir_ / "nope.json").string()).exit_code, 0);
  EXPECT_NE(run("run").exit_code, 0);
  EXPECT_NE(run("").exit_code, 0);
  EXPECT_NE(run("run --config " + cfg.string() + " --noise loud").exit_code, 0);
}

TEST_F(CliTest, EnumerateWorkloads) {
  const auto r =
      run("enumerate-workloads --schema " + (dir_ / "schema.json").string() + " --k 2");
  ASSERT_EQ(r.exit_code, 0);
  const auto w = json::parse(r.out);
  ASSERT_EQ(w.size(), 3u);
  EXPECT_EQ(w[1]["attributes"], json({"a", "c"}));
  EXPECT_EQ(w[1]["cells"], 4);
  const auto one =
      run("enumerate-workloads --schema " + (dir_ / "schema.json").string() + " --k 1");
  EXPECT_EQ(json::parse(one.out).size(), 3u);
  EXPECT_EQ(run("enumerate-workloads --schema " + (dir_ / "schema.json").string() +
                " --k 5")
                .exit_code,
            2);
}

TEST_F(CliTest, Version) {
  const auto r = run("--version");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("0.1.0"), std::string::npos);
}

}  // namespace
