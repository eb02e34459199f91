#include "cli.hpp"

#include "qmb/profiles.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace {

struct Outcome {
  int rc;
  std::string out, err;
  nlohmann::ordered_json json() const { return nlohmann::ordered_json::parse(out); }
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream o, e;
  const int rc = qmb::cli::run(args, o, e);
  return {rc, o.str(), e.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::filesystem::path tmp(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("qmb_test_" + std::to_string(::getpid()) + "_" + name);
}

nlohmann::ordered_json find_case(const nlohmann::ordered_json& j, const std::string& id) {
  for (const auto& c : j["cases"])
    if (c["id"] == id) return c;
  throw std::runtime_error("no case " + id);
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override { ::unsetenv("QMB_SEED"); }
  void TearDown() override { ::unsetenv("QMB_SEED"); }
};

}  // namespace

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(invoke({}).rc, 2);
  EXPECT_EQ(invoke({"frobnicate"}).rc, 2);
  EXPECT_EQ(invoke({"bell", "--no-such-flag"}).rc, 2);
  EXPECT_EQ(invoke({"bell", "--trials", "0"}).rc, 2);
  EXPECT_EQ(invoke({"reduce", "--alpha", "abc"}).rc, 2);
  EXPECT_EQ(invoke({"reduce", "--alpha", "1/0"}).rc, 2);
  EXPECT_EQ(invoke({"reduce", "--q", "1"}).rc, 2);
  EXPECT_EQ(invoke({"reduce", "--alpha", "0"}).rc, 2);
  EXPECT_EQ(invoke({"reduce", "--f1", "0"}).rc, 2);
  EXPECT_EQ(invoke({"verify-breather", "--grid", "21"}).rc, 2);
  EXPECT_EQ(invoke({"verify-breather", "--profile", "nope"}).rc, 2);
  EXPECT_EQ(invoke({"evolve", "--modes", "100"}).rc, 2);
  EXPECT_EQ(invoke({"profile", "eval", "--name", "nope"}).rc, 2);
  const Outcome r = invoke({"bell", "--no-such-flag"});
  EXPECT_NE(r.err.find("no-such-flag"), std::string::npos);
}

TEST_F(Cli, Version) {
  const Outcome r = invoke({"--version"});
  EXPECT_EQ(r.rc, 0);
  EXPECT_NE(r.out.find("0.1.0"), std::string::npos);
}

TEST_F(Cli, BellSuiteSchema) {
  const Outcome r = invoke({"bell", "--seed", "7"});
  ASSERT_EQ(r.rc, 0) << r.err;
  const auto j = r.json();
  EXPECT_EQ(j["tool_version"], "0.1.0");
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["suite"], "bell");
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"tool_version", "seed", "suite", "cases"}));
  std::string prev;
  for (const auto& c : j["cases"]) {
    EXPECT_EQ(c["verdict"], "pass") << c["id"];
    EXPECT_TRUE(c.contains("paper_ref"));
    EXPECT_TRUE(c["detail"].is_object());
    EXPECT_FALSE(c["detail"].contains("seconds"));
    EXPECT_LT(prev, c["id"].get<std::string>());
    prev = c["id"];
  }
}

TEST_F(Cli, ReduceQ5IsIncompatible) {
  const Outcome r = invoke({"reduce", "--q", "5", "--alpha", "1", "--f1", "1"});
  ASSERT_EQ(r.rc, 0) << r.err;
  const auto c = find_case(r.json(), "incompatibility");
  EXPECT_EQ(c["detail"]["verdict"], "incompatible");
  EXPECT_EQ(c["detail"]["leading"], "320");
}

TEST_F(Cli, ReduceQ3Parameters) {
  const Outcome r = invoke({"reduce", "--q", "3", "--alpha", "0.5", "--f1", "2"});
  ASSERT_EQ(r.rc, 0) << r.err;
  const auto c = find_case(r.json(), "q3_parameters");
  EXPECT_EQ(c["detail"]["alpha"], "1/2");
  EXPECT_EQ(c["detail"]["m"], "-8");
  EXPECT_EQ(c["detail"]["F3"], "-4");
}

TEST_F(Cli, ReduceEvenQ) {
  const Outcome r = invoke({"reduce", "--q", "4", "--alpha", "1", "--f1", "1", "--f2", "1/3"});
  ASSERT_EQ(r.rc, 0) << r.err;
  const auto c = find_case(r.json(), "even_q_certificate");
  EXPECT_EQ(c["verdict"], "pass");
}

TEST_F(Cli, FailedVerdictExitsOne) {
  const Outcome r = invoke({"verify-breather", "--profile", "mkdv", "--grid", "3x5", "--tolerance", "1e-300"});
  EXPECT_EQ(r.rc, 1);
  const auto j = r.json();
  for (const auto& c : j["cases"]) EXPECT_EQ(c["verdict"], "fail");
}

TEST_F(Cli, CoarseEvolutionFails) {
  // 256 modes cannot resolve the breather to 1e-4
  const Outcome r = invoke({"evolve", "--modes", "256", "--no-halving", "--no-reversal"});
  EXPECT_EQ(r.rc, 1);
  EXPECT_EQ(find_case(r.json(), "persistence")["verdict"], "fail");
}

TEST_F(Cli, SameSeedSameBytes) {
  const std::vector<std::string> a = {"verify-identities", "--trials", "2", "--seed", "9", "--workers", "1"};
  std::vector<std::string> b = a;
  b.back() = "3";
  const Outcome r1 = invoke(a), r2 = invoke(a), r3 = invoke(b);
  ASSERT_EQ(r1.rc, 0) << r1.err;
  EXPECT_EQ(r1.out, r2.out);
  EXPECT_EQ(r1.out, r3.out);
  std::vector<std::string> c = a;
  c[4] = "10";
  const Outcome r4 = invoke(c);
  EXPECT_NE(r1.out, r4.out);
  EXPECT_EQ(r4.json()["seed"], 10);
}

TEST_F(Cli, SeedFromEnvironment) {
  ::setenv("QMB_SEED", "77", 1);
  EXPECT_EQ(invoke({"bell"}).json()["seed"], 77);
  EXPECT_EQ(invoke({"bell", "--seed", "5"}).json()["seed"], 5);
  ::setenv("QMB_SEED", "x", 1);
  EXPECT_EQ(invoke({"bell"}).rc, 2);
  ::unsetenv("QMB_SEED");
  EXPECT_EQ(invoke({"bell"}).json()["seed"], 42);
}

TEST_F(Cli, ReportFileAndQuiet) {
  const auto path = tmp("report.json");
  const Outcome r = invoke({"bell", "--report", path.string(), "--quiet"});
  EXPECT_EQ(r.rc, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(slurp(path), invoke({"bell"}).out);
  std::filesystem::remove(path);
}

TEST_F(Cli, Timing) {
  const auto j = invoke({"bell", "--timing"}).json();
  for (const auto& c : j["cases"]) EXPECT_TRUE(c["detail"].contains("seconds"));
}

TEST_F(Cli, ConfigFile) {
  const auto path = tmp("run.ini");
  {
    std::ofstream f(path);
    f << "seed = 5\n[reduce]\nq = 5\nalpha = 1/2\n";
  }
  const Outcome r = invoke({"--config", path.string(), "reduce"});
  ASSERT_EQ(r.rc, 0) << r.err;
  const auto j = r.json();
  EXPECT_EQ(j["seed"], 5);
  EXPECT_EQ(find_case(j, "incompatibility")["detail"]["verdict"], "incompatible");
  std::filesystem::remove(path);
}

TEST_F(Cli, ProfileEval) {
  const Outcome r = invoke({"profile", "eval", "--name", "gamma0", "--alpha", "0.5", "--t0", "0.1", "--t1", "0.2", "--nt", "2",
                     "--x0", "-1", "--x1", "1", "--nx", "3"});
  ASSERT_EQ(r.rc, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,x,u,u_x,u_xx,u_xxx,u_t");
  int rows = 0;
  const qmb::Profile g = qmb::gamma0_profile(0.5);
  while (std::getline(in, line)) {
    std::vector<double> v;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) v.push_back(std::stod(cell));
    ASSERT_EQ(v.size(), 7u);
    EXPECT_NEAR(v[2], g.value(v[0], v[1]), 1e-14);
    EXPECT_NEAR(v[3], g.derivative(v[0], {v[1]}, {1, 0}), 1e-12);
    EXPECT_NEAR(v[6], g.derivative(v[0], {v[1]}, {0, 1}), 1e-10);
    ++rows;
  }
  EXPECT_EQ(rows, 6);
}

TEST_F(Cli, EvolveSeriesCsv) {
  const auto path = tmp("series.csv");
  // 128 modes fails the tolerance, but the series is still written
  const Outcome r = invoke({"evolve", "--modes", "128", "--no-halving", "--no-reversal", "--csv", path.string(), "--every", "500"});
  EXPECT_EQ(r.rc, 1);
  std::istringstream in(slurp(path));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,deviation,mass,l2");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_GE(rows, 2);
  std::filesystem::remove(path);
}
