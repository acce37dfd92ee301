#include "ghostwalk/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <sys/wait.h>

#include "json.hpp"

namespace gw = ghostwalk;
using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = gw::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

// Exit code of the real binary; stdout and stderr are discarded.
int run_binary(const std::string& args) {
  const std::string cmd = std::string(GHOSTWALK_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(StateSpec, Grammar) {
  const auto s = gw::parse_state_spec("k=2,survivors=0,ghosts=(2,4);(6,6)");
  EXPECT_EQ(s.survivors, std::vector<int>{0});
  EXPECT_EQ(s.ghost_pairs, (std::vector<std::pair<int, int>>{{2, 4}, {6, 6}}));
  EXPECT_EQ(gw::parse_state_spec("survivors=-1,3").survivors, (std::vector<int>{-1, 3}));
  EXPECT_TRUE(gw::parse_state_spec("survivors=,ghosts=(1,1)").survivors.empty());

  const auto named = gw::parse_state_spec("survivors=x", [](std::string_view t) { return t == "x" ? 7 : -1; });
  EXPECT_EQ(named.survivors, std::vector<int>{7});

  for (const char* bad : {"k=1,survivors=0", "survivors=3,1", "ghosts=(1,2", "ghosts=1,2", "colour=red", "survivors"}) {
    EXPECT_THROW(gw::parse_state_spec(bad), std::invalid_argument) << bad;
  }
}

TEST(Cli, WeightOfOneState) {
  const auto r = run({"weight", "--lattice", "0,2", "--t", "2", "--state", "survivors=0,2"});
  EXPECT_EQ(r.code, gw::kExitOk) << r.err;
  EXPECT_NE(r.err.find("3/16"), std::string::npos) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_EQ(doc.at("states").at(0).at("weight"), "3/16");
}

TEST(Cli, WeightAllStatesSumsToOne) {
  const auto r = run({"weight", "--lattice", "0,2,4", "--t", "2", "--all-states", "--format", "csv"});
  EXPECT_EQ(r.code, gw::kExitOk) << r.err;
  EXPECT_NE(r.err.find("total: 1"), std::string::npos) << r.err;
  EXPECT_EQ(r.out.rfind("k,survivors,ghost_pairs,weight\n", 0), 0U);
}

TEST(Cli, WeightOnGraphFile) {
  const auto path = std::filesystem::temp_directory_path() / "ghostwalk_cli_graph.json";
  {
    std::ofstream f(path);
    f << R"({"lattice": {"min": -2, "max": 2, "horizon": 2}, "sources": ["0@0"], "targets": ["-2@2", "0@2", "2@2"]})";
  }
  const auto r = run({"weight", "--graph", path.string(), "--state", "survivors=0@2"});
  EXPECT_EQ(r.code, gw::kExitOk) << r.err;
  EXPECT_NE(r.err.find("1/2"), std::string::npos) << r.err;
  std::filesystem::remove(path);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({"weight", "--lattice", "0,2", "--t", "1", "--state", "survivors=9"}).code, gw::kExitUsage);
  EXPECT_EQ(run({"weight", "--lattice", "0,2", "--t", "1", "--state", "k=1"}).code, gw::kExitUsage);
  EXPECT_EQ(run({"weight", "--lattice", "0,1", "--t", "1", "--all-states"}).code, gw::kExitUsage);
  EXPECT_EQ(run({"weight", "--t", "1", "--all-states"}).code, gw::kExitUsage);
  EXPECT_EQ(run({"compare", "--lattice", "0,2", "--t", "1", "--format", "xml"}).code, gw::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, gw::kExitUsage);
  EXPECT_EQ(run({}).code, gw::kExitUsage);
  EXPECT_EQ(run({"--help"}).code, gw::kExitOk);
}

TEST(Cli, CompareAgrees) {
  const auto r = run({"compare", "--lattice", "0,2,4", "--t", "2", "--jobs", "2"});
  EXPECT_EQ(r.code, gw::kExitOk) << r.err;
  EXPECT_NE(r.err.find("states: 33, mismatches: 0, total: 1"), std::string::npos) << r.err;
}

TEST(Cli, ComparePfaffian) {
  const auto r = run({"compare", "--lattice", "0,2,4,6", "--t", "2", "--pfaffian"});
  EXPECT_EQ(r.code, gw::kExitOk) << r.err;
  EXPECT_NE(r.err.find("pfaffian: 35/256"), std::string::npos) << r.err;
  EXPECT_EQ(run({"compare", "--lattice", "0,2,4", "--t", "1", "--pfaffian"}).code, gw::kExitUsage);
}

TEST(Cli, CorruptedFormulaIsCaught) {
  const auto r = run({"compare", "--lattice", "0,2", "--t", "2", "--corrupt-formula"});
  EXPECT_EQ(r.code, gw::kExitVerificationFailure);
}

TEST(Cli, AuditPasses) {
  const auto r = run({"audit", "--lattice", "0,2,4", "--t", "2"});
  EXPECT_EQ(r.code, gw::kExitOk) << r.err;
  EXPECT_NE(r.err.find("violations: 0"), std::string::npos) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_TRUE(doc.contains("audit"));
}

TEST(Cli, AuditRefusesMixedParity) {
  const auto r = run({"audit", "--lattice", "0,1", "--t", "1"});
  EXPECT_EQ(r.code, gw::kExitVerificationFailure);
  EXPECT_NE(r.err.find("refused"), std::string::npos) << r.err;
}

TEST(Cli, PrescribedCustomRows) {
  const auto r = run({"prescribed", "--tuples", "-2,0,2;-2,0,4;0,2,4"});
  EXPECT_EQ(r.code, gw::kExitOk) << r.err;
  EXPECT_NE(r.err.find("consistent"), std::string::npos) << r.err;
  EXPECT_EQ(run({"prescribed", "--tuples", "0,-2,4"}).code, gw::kExitUsage);
}

TEST(Cli, ResourceCap) {
  EXPECT_EQ(run({"compare", "--lattice", "0,2,4,6", "--t", "4", "--cap", "1000"}).code, gw::kExitResourceCap);
}

TEST(CliBinary, ExitCodes) {
  EXPECT_EQ(run_binary("weight --lattice 0,2 --t 2 --state survivors=0,2"), 0);
  EXPECT_EQ(run_binary("weight --lattice 0,2 --t 2 --state survivors=2,0"), 2);
  EXPECT_EQ(run_binary("compare --lattice 0,2 --t 1 --corrupt-formula"), 1);
  EXPECT_EQ(run_binary("compare --lattice 0,2,4,6 --t 4 --cap 100"), 3);
}
