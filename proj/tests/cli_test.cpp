/*
   Copyright 2026 The delaynet Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/


#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>

#include "delaynet/cli.hpp"
#include "test_support.hpp"

using namespace delaynet;
using namespace delaynet::testing;
using nlohmann::json;

namespace {

RunConfig cfg_for(const std::string& command, const std::string& net) {
  RunConfig c;
  c.command = command;
  c.network = fixture(net);
  return c;
}

std::string temp_file(const std::string& name, const std::string& body) {
  std::string path = ::testing::TempDir() + name;
  std::ofstream(path, std::ios::binary) << body;
  return path;
}

}  // namespace

TEST(Fnv, KnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(Cli, ComputeTransferTableII) {
  RunConfig c = cfg_for("compute-transfer", "fig2.json");
  c.lecs = "ones";
  RunResult r = evaluate(c);
  ASSERT_EQ(r.status, 0) << r.error;
  EXPECT_EQ(r.report["schema_version"], kSchemaVersion);
  EXPECT_EQ(r.report["version"], DELAYNET_VERSION);
  EXPECT_EQ(r.report["seed"], 0);
  EXPECT_EQ(r.report["inputs"].size(), 1u);
  EXPECT_EQ(r.report["inputs"][0]["fnv1a64"].get<std::string>().size(), 16u);
  EXPECT_EQ(r.report["result"]["demanded_determinants"], json({"D^5", "D^5", "D^6", "D^5", "D^4"}));
  EXPECT_EQ(r.report["result"]["f"], "D^25");
}

TEST(Cli, SymbolicTransfer) {
  RunResult r = evaluate(cfg_for("compute-transfer", "ex3.json"));
  ASSERT_EQ(r.status, 0) << r.error;
  EXPECT_TRUE(r.report["result"]["symbolic"].get<bool>());
}

TEST(Cli, PbnaExample2) {
  RunConfig c = cfg_for("pbna-check", "ex2.json");
  c.scheme = "1";
  c.nprime = 3;
  c.lecs = fixture("ex2-lecs.json");
  RunResult r = evaluate(c);
  ASSERT_EQ(r.status, 0) << r.error;
  EXPECT_EQ(r.report["result"]["verdict"], "feasible");
  EXPECT_EQ(r.report["inputs"].size(), 2u);
}

TEST(Cli, PbnaInfeasibleStillExitsZero) {
  RunConfig c = cfg_for("pbna-check", "ex3.json");
  c.scheme = "2";
  c.n1 = 3;
  c.n2 = c.n3 = 2;
  c.n = 6;
  c.trials = 2;
  RunResult r = evaluate(c);
  ASSERT_EQ(r.status, 0) << r.error;
  EXPECT_EQ(r.report["result"]["verdict"], "infeasible");
}

TEST(Cli, Determinism) {
  RunConfig c = cfg_for("pbna-check", "ex4.json");
  c.scheme = "2";
  c.n1 = 5;
  c.n2 = c.n3 = 3;
  c.n = 8;
  c.seed = 12;
  c.trials = 4;
  c.strategy = "free";
  EXPECT_EQ(evaluate(c).report.dump(), evaluate(c).report.dump());
  RunConfig t = cfg_for("transform-simulate", "fig2.json");
  t.field = "2^3";
  t.lecs = "ones";
  t.n = 7;
  t.seed = 5;
  EXPECT_EQ(evaluate(t).report.dump(), evaluate(t).report.dump());
}

TEST(Cli, TransformSimulate) {
  RunConfig c = cfg_for("transform-simulate", "fig2.json");
  c.field = "2^3";
  c.lecs = "ones";
  c.n = 7;
  RunResult r = evaluate(c);
  ASSERT_EQ(r.status, 0) << r.error;
  EXPECT_EQ(r.report["result"]["max_residual"], 0);
  EXPECT_EQ(r.report["result"]["residuals"].size(), 7u);
  for (const auto& e : r.report["result"]["decode_symbol_errors"]) EXPECT_EQ(e, 0);

  std::string inputs = temp_file("in.json", R"({"s1": ["1", 0, 0, 0, 0, 0, "b^3"], "s2": [1, 1, 1, 1, 1, 1, 1], "s3": [0, 0, 0, 0, 0, 0, 0]})");
  c.inputs = inputs;
  r = evaluate(c);
  ASSERT_EQ(r.status, 0) << r.error;
  EXPECT_EQ(r.report["inputs"].size(), 2u);
  c.inputs = temp_file("short.json", R"({"s1": ["1"]})");
  EXPECT_EQ(evaluate(c).status, 2);
}

TEST(Cli, FieldIncompatibilitySuggestsExtension) {
  RunConfig c = cfg_for("check-feasibility", "fig2.json");
  c.mode = "transform";
  c.lecs = "ones";
  c.n = 7;
  RunResult r = evaluate(c);
  EXPECT_EQ(r.status, 3);
  EXPECT_NE(r.error.find("--field 2^3"), std::string::npos) << r.error;
}

TEST(Cli, FeasibilityModes) {
  RunConfig c = cfg_for("check-feasibility", "fig2.json");
  c.lecs = "ones";
  RunResult r = evaluate(c);
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(r.report["result"]["verdict"], "solvable");
  c.mode = "search";
  r = evaluate(c);
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(r.report["result"]["b"], 3);
  EXPECT_EQ(r.report["result"]["n"], 7);
  c.mode = "bogus";
  EXPECT_EQ(evaluate(c).status, 2);
}

TEST(Cli, OnoffCheck) {
  RunConfig c = cfg_for("onoff-check", "onoff5.json");
  c.cancellations = fixture("onoff5-cancel.json");
  c.lecs = fixture("onoff-lecs.json");
  RunResult r = evaluate(c);
  ASSERT_EQ(r.status, 0) << r.error;
  EXPECT_EQ(r.report["result"]["schedule"], json({{"S1", "odd"}, {"S2", "even"}, {"S3", "even"}}));
  EXPECT_EQ(r.report["inputs"].size(), 3u);
}

TEST(Cli, ParseErrorsCarryPosition) {
  RunConfig c;
  c.command = "compute-transfer";
  c.network = temp_file("empty.json", "");
  RunResult r = evaluate(c);
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.error.find("line 1"), std::string::npos);
  c.network = temp_file("bad.json", "{\n  \"edges\": [,]\n}");
  r = evaluate(c);
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.error.find("line 2, column"), std::string::npos) << r.error;
  c.network = "/nonexistent/net.json";
  EXPECT_EQ(evaluate(c).status, 2);
  c.command = "frobnicate";
  c.network = fixture("fig2.json");
  EXPECT_EQ(evaluate(c).status, 2);
}

TEST(Cli, EnvironmentFieldIsADefault) {
  std::string net = temp_file("nofield.json", R"({
    "edges": [{"tail": "s", "head": "t", "lec": "b^2"}],
    "sources": ["s"], "sinks": ["t"], "connections": [["s", "t", 0]]
  })");
  RunConfig c;
  c.command = "compute-transfer";
  c.network = net;
  c.lecs = "ones";
  ::setenv("DELAYNET_FIELD", "2^3", 1);
  RunResult r = evaluate(c);
  ASSERT_EQ(r.status, 0) << r.error;
  EXPECT_EQ(r.report["field"], make_field(2, 3)->descriptor());
  // A field named in the file wins over the environment.
  c.network = fixture("fig2.json");
  EXPECT_EQ(evaluate(c).report["field"], make_field(2, 1)->descriptor());
  // The command line wins over both.
  c.field = "2^2";
  EXPECT_EQ(evaluate(c).report["field"], make_field(2, 2)->descriptor());
  ::unsetenv("DELAYNET_FIELD");
}

TEST(Cli, RunWritesReport) {
  RunConfig c = cfg_for("compute-transfer", "fig2.json");
  c.lecs = "ones";
  c.output = ::testing::TempDir() + "report.json";
  ASSERT_EQ(run(c).status, 0);
  std::ifstream in(c.output);
  json j = json::parse(in);
  EXPECT_EQ(j["command"], "compute-transfer");
}
