#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "purex_cli/cli.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "purex");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = purex::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, ExitCodes) {
  EXPECT_EQ(call({"--help"}).code, 0);
  const Result unknown = call({"frobnicate"});
  EXPECT_EQ(unknown.code, 1);
  EXPECT_NE(unknown.err.find("Usage"), std::string::npos);
  EXPECT_EQ(call({}).code, 1);
  EXPECT_EQ(call({"oracle", "--means", "1,0", "--delta", "1.5"}).code, 1);
  EXPECT_EQ(call({"project", "--weights", "0.5,0.5", "--eps", "0.9"}).code, 1);
}

TEST(Cli, OracleClosedForm) {
  const Result r = call({"oracle", "--means", "1,0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["t_star_inv"].get<double>(), 0.125, 1e-9);
  EXPECT_EQ(j["i_f"], nlohmann::json::array({0}));
}

TEST(Cli, Project) {
  const Result r = call({"project", "--weights", "1,0,0", "--eps", "0.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto p = nlohmann::json::parse(r.out)["projected"].get<std::vector<double>>();
  EXPECT_NEAR(p[0], 0.8, 1e-15);
  EXPECT_NEAR(p[2], 0.1, 1e-15);
}

TEST(Cli, Bounds) {
  const Result r = call({"bounds", "--means", "1,0", "--delta", "0.1,0.01"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    for (const char* key : {"D_K", "T_M", "T0", "lower_bound", "upper_bound"}) {
      EXPECT_TRUE(j.contains(key)) << key;
    }
    ++n;
  }
  EXPECT_EQ(n, 2);
}

TEST(Cli, McRowsPerDelta) {
  const Result r = call({"mc", "--means", "1,0", "--delta", "0.2,0.1,0.05", "--replications", "5",
                         "--workers", "2", "--dk-override", "1", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "delta,replications,mean_tau,se_tau,err_rate,ratio,lower_bound,upper_bound");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 3);
}

TEST(Cli, RunIsByteIdentical) {
  const auto dir = std::filesystem::temp_directory_path() / "purex_cli_test";
  std::filesystem::create_directories(dir);
  const std::vector<std::string> base{"run", "--means", "1,0.5,0", "--delta", "0.05",
                                      "--seed", "11", "--dk-override", "1",
                                      "--trajectory-stride", "7", "--diag-good-event"};
  auto a = base;
  a.insert(a.end(), {"--out", (dir / "a.jsonl").string()});
  auto b = base;
  b.insert(b.end(), {"--out", (dir / "b.jsonl").string()});
  ASSERT_EQ(call(a).code, 0);
  ASSERT_EQ(call(b).code, 0);
  const std::string sa = slurp(dir / "a.jsonl");
  EXPECT_FALSE(sa.empty());
  EXPECT_EQ(sa, slurp(dir / "b.jsonl"));
  EXPECT_EQ(call(base).out, sa);
  std::filesystem::remove_all(dir);
}

TEST(Cli, Selftest) {
  const Result r = call({"selftest"});
  EXPECT_EQ(r.code, 0) << r.out;
}
