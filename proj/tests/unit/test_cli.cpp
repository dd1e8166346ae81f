#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "medoidjl/cli.hpp"

namespace medoidjl {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "medoidjl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("medoidjl_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(CliTest, GenThenDdimAndOptOnBasis) {
  ASSERT_EQ(run({"gen", "--family", "basis", "--param", "n=8", "--out", path("basis8.csv")}).code, 0);
  auto d = run({"ddim", "--input", path("basis8.csv")});
  ASSERT_EQ(d.code, 0);
  EXPECT_EQ(nlohmann::json::parse(d.out)["ddim"], 3.0);
  auto o = run({"opt", "--input", path("basis8.csv"), "--mode", "exact", "--k", "2"});
  ASSERT_EQ(o.code, 0);
  EXPECT_NEAR(nlohmann::json::parse(o.out)["value"].get<double>(), 6 * std::sqrt(2.0), 1e-12);
}

TEST_F(CliTest, VerifyIdentityPasses) {
  ASSERT_EQ(run({"gen", "--family", "doubling", "--param", "n=12", "--seed", "2", "--out",
                 path("p.csv")}).code, 0);
  auto v = run({"verify", "--check", "expansion", "--input", path("p.csv"), "--identity"});
  ASSERT_EQ(v.code, 0) << v.err;
  auto j = nlohmann::json::parse(v.out);
  EXPECT_EQ(j["rate"], 1.0);
  EXPECT_EQ(j["reports"][0]["worst_ratio"], 1.0);
}

TEST_F(CliTest, ProjectNetAndStats) {
  ASSERT_EQ(run({"gen", "--family", "pairs", "--param", "k=5", "--out", path("p.csv")}).code, 0);
  auto p = run({"project", "--input", path("p.csv"), "--t", "2", "--seed", "1", "--map-out",
                path("g.bin")});
  ASSERT_EQ(p.code, 0);
  EXPECT_EQ(p.out.substr(0, 7), "# dim=2");
  EXPECT_EQ(fs::file_size(path("g.bin")), 24u + 2 * 3 * 8);
  auto n = run({"net", "--input", path("p.csv"), "--rho", "2"});
  ASSERT_EQ(n.code, 0);
  EXPECT_TRUE(nlohmann::json::parse(n.out)["covering"].get<bool>());
  auto s = run({"stats", "--kind", "chi-square", "--t", "8", "--eps", "0.25", "--trials", "1000"});
  ASSERT_EQ(s.code, 0);
  EXPECT_EQ(s.out.substr(0, s.out.find('\n')), "t,eps,estimate,stderr,bound");
}

TEST_F(CliTest, ExperimentIsByteReproducible) {
  std::ofstream(path("cfg.toml")) << "trials = 6\nbase_seed = 4\n"
                                     "[instance]\nfamily = \"doubling\"\nseed = 1\n"
                                     "params = { n = 10 }\n"
                                     "[projection]\nt = [3, 6]\n"
                                     "[[checks]]\nname = \"contraction\"\n"
                                     "[[checks]]\nname = \"good-events\"\n";
  ASSERT_EQ(run({"experiment", "--config", path("cfg.toml"), "--out", path("a.csv")}).code, 0);
  ASSERT_EQ(run({"experiment", "--config", path("cfg.toml"), "--out", path("b.csv"), "--workers",
                 "3"}).code, 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  auto j = nlohmann::json::parse(slurp(path("a.json")));
  EXPECT_EQ(j["contraction"]["trials"], 12);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"ddim"}).code, kExitUsage);
  EXPECT_EQ(run({"ddim", "--input", path("missing.csv")}).code, kExitUsage);
  EXPECT_EQ(run({"gen", "--family", "basis", "--param", "n=5"}).code, kExitUsage);
  EXPECT_EQ(run({"--help"}).code, kExitOk);
}

}  // namespace
}  // namespace medoidjl
