// Copyright 2026 The dpsos Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "dpsos/cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dpsos::cli {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "dpsos");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
}

class CliTest : public ::testing::Test {
 protected:
  std::string dir = ::testing::TempDir();
  std::string path(const std::string& name) const { return dir + "/cli_test_" + name; }
};

TEST_F(CliTest, GenTwiceGivesIdenticalFiles) {
  for (const char* name : {"a.csv", "b.csv"}) {
    Result r = run_cli({"gen", "--spec", "gauss", "--n", "20", "--d", "1", "--seed", "7", "--out",
                        path(name)});
    ASSERT_EQ(r.code, kExitOk) << r.err;
  }
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_EQ(slurp(path("a.csv.meta.json")), slurp(path("b.csv.meta.json")));
  nlohmann::json meta = nlohmann::json::parse(slurp(path("a.csv.meta.json")));
  EXPECT_EQ(meta["seed"], 7);
  EXPECT_EQ(meta["schema_version"], 1);
}

TEST_F(CliTest, GenWithAdversaryRecordsReplacedRows) {
  Result r = run_cli({"gen", "--n", "40", "--seed", "1", "--adversary", "far-cluster", "--eta",
                      "0.1", "--out", path("adv.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  nlohmann::json meta = nlohmann::json::parse(slurp(path("adv.csv.meta.json")));
  EXPECT_EQ(meta["replaced_indices"].size(), 4u);
  EXPECT_EQ(meta["adversary"]["kind"], "far-cluster");
}

TEST_F(CliTest, EstimateReportsStatusAndIsByteIdenticalPerSeed) {
  ASSERT_EQ(run_cli({"gen", "--n", "20", "--seed", "7", "--out", path("e.csv")}).code, kExitOk);
  Result a = run_cli({"estimate", "--data", path("e.csv"), "--seed", "3", "--mode", "pinned"});
  Result b = run_cli({"estimate", "--data", path("e.csv"), "--seed", "3", "--mode", "pinned"});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  nlohmann::json j = nlohmann::json::parse(a.out);
  const std::string status = j["status"];
  EXPECT_TRUE(status == "ok" || status.rfind("reject-", 0) == 0) << status;
  EXPECT_EQ(j["seed"], 3);
  EXPECT_EQ(j["config"]["mode"], "pinned-witness");
}

TEST_F(CliTest, EstimateReleasesWithParamsFile) {
  ASSERT_EQ(run_cli({"gen", "--n", "200", "--seed", "5", "--out", path("r.csv")}).code, kExitOk);
  spit(path("params.json"),
       R"({"eta": 0.25, "C": 8, "L": 10, "epsilon": 1, "delta": 0.5, "mode": "pinned"})");
  int ok = 0;
  for (int seed = 0; seed < 10; ++seed) {
    Result r = run_cli({"estimate", "--data", path("r.csv"), "--params", path("params.json"),
                        "--seed", std::to_string(seed)});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    nlohmann::json j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["config"]["C"], 8.0);
    ok += j["status"] == "ok";
  }
  EXPECT_GT(ok, 0);
}

TEST_F(CliTest, MalformedInputsExitTwoWithLocation) {
  spit(path("bad.csv"), "x1\n1\nabc\n");
  Result r = run_cli({"estimate", "--data", path("bad.csv"), "--seed", "1"});
  EXPECT_EQ(r.code, kExitMalformed);
  EXPECT_NE(r.err.find("bad.csv:3:1"), std::string::npos) << r.err;

  spit(path("bad.json"), "{\"eta\": 0.1,\n");
  ASSERT_EQ(run_cli({"gen", "--n", "5", "--seed", "1", "--out", path("ok.csv")}).code, kExitOk);
  r = run_cli({"estimate", "--data", path("ok.csv"), "--seed", "1", "--params", path("bad.json")});
  EXPECT_EQ(r.code, kExitMalformed);
  EXPECT_NE(r.err.find("bad.json:2"), std::string::npos) << r.err;

  spit(path("unknown.json"), "{\"epsilonn\": 1}");
  r = run_cli({"estimate", "--data", path("ok.csv"), "--seed", "1", "--params",
               path("unknown.json")});
  EXPECT_EQ(r.code, kExitMalformed);

  EXPECT_EQ(run_cli({"estimate", "--data", path("missing.csv"), "--seed", "1"}).code,
            kExitMalformed);
  EXPECT_EQ(run_cli({"estimate", "--data", path("ok.csv")}).code, kExitMalformed);
  EXPECT_EQ(run_cli({"bogus"}).code, kExitMalformed);
  EXPECT_EQ(run_cli({}).code, kExitMalformed);
  EXPECT_EQ(run_cli({"--help"}).code, kExitOk);
}

TEST_F(CliTest, CertifyIsDeterministicAndEchoesConfig) {
  ASSERT_EQ(run_cli({"gen", "--n", "50", "--seed", "2", "--out", path("c.csv")}).code, kExitOk);
  Result r = run_cli({"certify", "--data", path("c.csv"), "--C", "2", "--k", "2"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  nlohmann::json j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["accepted"], true);
  EXPECT_EQ(j["config"]["C"], 2.0);
  EXPECT_EQ(r.out, run_cli({"certify", "--data", path("c.csv"), "--C", "2"}).out);
}

TEST_F(CliTest, AuditPrivacyAndStability) {
  ASSERT_EQ(run_cli({"gen", "--n", "200", "--seed", "5", "--out", path("a.csv")}).code, kExitOk);
  Result r = run_cli({"audit", "--data", path("a.csv"), "--index", "0", "--replace", "1000",
                      "--seed", "9", "--trials", "10000", "--mode", "pinned", "--eta", "0.25",
                      "--C", "8", "--L", "10", "--delta", "0.5"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  nlohmann::json j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["violation"], false);
  EXPECT_EQ(j["trials"], 10000);
  r = run_cli({"audit", "--data", path("a.csv"), "--index", "0", "--replace", "1000",
               "--stability", "--tau", "3", "--mode", "pinned"});
  ASSERT_NE(r.code, kExitMalformed) << r.err;
  j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["values"].contains("pot_diff"));
  EXPECT_TRUE(j["bounds"].contains("pot_diff"));
  EXPECT_EQ(run_cli({"audit", "--data", path("a.csv"), "--replace", "1,2", "--seed", "1"}).code,
            kExitMalformed);
}

TEST_F(CliTest, LemmasExitCodeReflectsTheReport) {
  Result r = run_cli({"lemmas", "--config", "default", "--seed", "2026"});
  nlohmann::json j = nlohmann::json::parse(r.out);
  EXPECT_EQ(r.code, j["all_pass"].get<bool>() ? kExitOk : kExitCheckFailed);
  EXPECT_EQ(j["config"]["seed"], 2026);
  EXPECT_EQ(run_cli({"lemmas", "--config", "default"}).code, kExitMalformed);
}

TEST_F(CliTest, LemmasDefaultConfigExitsZero) {
  EXPECT_EQ(run_cli({"lemmas", "--config", "default", "--seed", "2026"}).code, kExitOk);
}

TEST_F(CliTest, WorkerEnvironmentVariableIsValidated) {
  ASSERT_EQ(run_cli({"gen", "--n", "20", "--seed", "7", "--out", path("w.csv")}).code, kExitOk);
  setenv("DPSOS_WORKERS", "zero", 1);
  EXPECT_EQ(run_cli({"estimate", "--data", path("w.csv"), "--seed", "1"}).code, kExitMalformed);
  setenv("DPSOS_WORKERS", "2", 1);
  Result two = run_cli({"estimate", "--data", path("w.csv"), "--seed", "1", "--mode", "pinned"});
  unsetenv("DPSOS_WORKERS");
  Result one = run_cli({"estimate", "--data", path("w.csv"), "--seed", "1", "--mode", "pinned"});
  EXPECT_EQ(two.out, one.out);
}

}  // namespace
}  // namespace dpsos::cli
