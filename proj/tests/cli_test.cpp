#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "idslab/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string output;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(IDSLAB_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) r.output.append(buf, n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("idslab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, PatternsOnPeriodTwoGivesExactHalves) {
  const auto cfg = write_config("c.json", R"({"M": [1, 2]})");
  const auto r = run("patterns --config " + cfg.string() + " --out " + (dir_ / "out").string());
  ASSERT_EQ(r.status, 0) << r.output;
  const auto j = nlohmann::json::parse(slurp(dir_ / "out" / "patterns_M1.json"));
  ASSERT_EQ(j["frequencies"].size(), 2u);
  for (const auto& [key, v] : j["frequencies"].items()) {
    EXPECT_EQ(v["num"], 1) << key;
    EXPECT_EQ(v["den"], 2) << key;
  }
  EXPECT_TRUE(fs::exists(dir_ / "out" / "patterns_M2.json"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "manifest.json"));
}

TEST_F(CliTest, EmptyMListIsRejected) {
  const auto cfg = write_config("c.json", "{\n  \"M\": []\n}");
  const auto r = run("ids --config " + cfg.string() + " --out " + (dir_ / "out").string());
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("M list must not be empty"), std::string::npos) << r.output;
}

TEST_F(CliTest, UnknownKeyReportsLine) {
  const auto cfg = write_config("c.json", "// header\n{\n  \"dimension\": 1,\n  \"windw\": {}\n}");
  const auto r = run("patterns --config " + cfg.string());
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("config:4:"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("windw"), std::string::npos) << r.output;
}

TEST_F(CliTest, WrongTypeIsRejected) {
  const auto cfg = write_config("c.json", "{\"resolution\": \"eight\"}");
  EXPECT_EQ(run("patterns --config " + cfg.string()).status, 2);
}

TEST_F(CliTest, UnknownSubcommandFails) { EXPECT_NE(run("frobnicate").status, 0); }

TEST_F(CliTest, RerunsAreByteIdentical) {
  const auto cfg = write_config(
      "c.json", R"({"M": [1, 2, 3], "sequence": {"list": [8, 16, 32]}, "ssf": {"cells": 6, "young_samples": 10},
                    "weyl": {"L": 8}, "random": {"samples": 10, "R": 6, "j": [16, 32], "omegas": 2}})");
  for (const std::string sub : {"patterns", "ids", "ssf", "weyl", "random"}) {
    const auto a = dir_ / ("a_" + sub), b = dir_ / ("b_" + sub);
    ASSERT_EQ(run(sub + " --config " + cfg.string() + " --out " + a.string() + " --jobs 1").status, 0) << sub;
    ASSERT_EQ(run(sub + " --config " + cfg.string() + " --out " + b.string() + " --jobs 3").status, 0) << sub;
    std::size_t compared = 0;
    for (const auto& e : fs::directory_iterator(a)) {
      if (e.path().filename() == "manifest.json") continue;
      EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << sub << " " << e.path().filename();
      ++compared;
    }
    EXPECT_GT(compared, 0u) << sub;
  }
}

TEST_F(CliTest, ShippedConfigParses) {
  const auto r = run(std::string("patterns --config ") + IDSLAB_CONFIG_DIR + "/default.json --out " + (dir_ / "o").string());
  EXPECT_EQ(r.status, 0) << r.output;
}
