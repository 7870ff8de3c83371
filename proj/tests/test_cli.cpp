// Copyright 2026 The contactsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;

const fs::path kScratch = CONTACTSIM_SCRATCH_DIR;

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the CLI with stdout and stderr captured to files; returns the exit code.
int run(const std::string& args, const std::string& tag) {
  fs::create_directories(kScratch);
  const std::string cmd = std::string(CONTACTSIM_CLI_PATH) + " " + args + " > " +
                          (kScratch / (tag + ".out")).string() + " 2> " +
                          (kScratch / (tag + ".err")).string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string out_of(const std::string& tag) { return read_file(kScratch / (tag + ".out")); }
std::string err_of(const std::string& tag) { return read_file(kScratch / (tag + ".err")); }

TEST(Cli, ListNamesBuiltins) {
  ASSERT_EQ(run("list", "list"), 0);
  const std::string out = out_of("list");
  for (const char* name : {"ball_drop", "soft_sphere_drop", "bouncing_ball_energy", "conveyor_belt",
                           "soft_clutter", "hard_clutter", "stiff_pd", "pendulum"})
    EXPECT_NE(out.find(name), std::string::npos) << name;
}

TEST(Cli, SimulateWritesCsvAndReport) {
  const fs::path csv = kScratch / "ball.csv", report = kScratch / "ball.json";
  ASSERT_EQ(run("simulate --scenario ball_drop --duration 0.2 --sample-rate 50 --out " +
                    csv.string() + " --report " + report.string(),
                "sim"),
            0)
      << err_of("sim");
  const std::string text = read_file(csv);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "t,ball.x,ball.y,ball.z,ball.qw,ball.qx,ball.qy,ball.qz,ball.vx,ball.vy,ball.vz,"
            "ball.wx,ball.wy,ball.wz,e,dt");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 11);
  const auto j = nlohmann::json::parse(read_file(report));
  EXPECT_EQ(j["status"], "ok");
  EXPECT_EQ(j["scheme"], "cenic1");
}

TEST(Cli, SimulateToStdoutIsByteIdentical) {
  const std::string args = "simulate --scenario soft_clutter --seed 3 --duration 0.1 --accuracy 1e-2";
  ASSERT_EQ(run(args, "rep1"), 0) << err_of("rep1");
  ASSERT_EQ(run(args, "rep2"), 0) << err_of("rep2");
  EXPECT_FALSE(out_of("rep1").empty());
  EXPECT_EQ(out_of("rep1"), out_of("rep2"));
}

TEST(Cli, SweepRowsAndDeterminism) {
  const std::string args =
      "sweep --scenario ball_drop --schemes cenic1,cenic2,rk3 --accuracies 1e-2,1e-3 "
      "--duration 0.2";
  ASSERT_EQ(run(args + " --jobs 4", "sw1"), 0) << err_of("sw1");
  ASSERT_EQ(run(args + " --jobs 1", "sw2"), 0) << err_of("sw2");
  const std::string a = out_of("sw1");
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 1 + 6);
  EXPECT_EQ(a.find("wall_time"), std::string::npos);
  EXPECT_EQ(a, out_of("sw2"));
}

TEST(Cli, InvalidMaterialExitsWithValidationError) {
  auto doc = nlohmann::json::parse([] {
    EXPECT_EQ(run("dump --scenario ball_drop", "dump"), 0);
    return out_of("dump");
  }());
  ASSERT_TRUE(doc.contains("materials"));
  ASSERT_FALSE(doc["materials"].empty());
  doc["materials"][0]["mu_static"] = 0.3;
  doc["materials"][0]["mu_dynamic"] = 0.6;
  const fs::path bad = kScratch / "bad_material.json";
  std::ofstream(bad) << doc.dump(2);
  EXPECT_EQ(run("simulate --scenario " + bad.string(), "bad"), 2);
  const auto err = nlohmann::json::parse(err_of("bad"));
  EXPECT_EQ(err["error"], "validation");
  EXPECT_NE(err["message"].get<std::string>().find("mu_dynamic"), std::string::npos);
}

TEST(Cli, DumpRoundTrips) {
  ASSERT_EQ(run("dump --scenario hard_clutter --seed 5", "d1"), 0);
  const fs::path p = kScratch / "hard.json";
  std::ofstream(p) << out_of("d1");
  ASSERT_EQ(run("dump --scenario " + p.string(), "d2"), 0) << err_of("d2");
  EXPECT_EQ(nlohmann::json::parse(out_of("d1")), nlohmann::json::parse(out_of("d2")));
}

TEST(Cli, BaselineOnLimitedModelIsConfigurationError) {
  EXPECT_EQ(run("simulate --scenario stiff_pd --scheme ie", "ie"), 2);
  EXPECT_EQ(nlohmann::json::parse(err_of("ie"))["error"], "configuration");
}

TEST(Cli, UnknownScenarioAndBadFlags) {
  EXPECT_EQ(run("simulate --scenario no_such_scene", "unknown"), 2);
  EXPECT_EQ(run("simulate --scenario ball_drop --scheme euler", "scheme"), 2);
  EXPECT_EQ(run("simulate --scenario ball_drop --accuracy -1", "acc"), 2);
  EXPECT_EQ(run("simulate", "missing"), 2);
}

TEST(Cli, UnderflowIsRuntimeError) {
  EXPECT_EQ(run("simulate --scenario ball_drop --accuracy 1e-40 --duration 0.5", "underflow"), 1);
  EXPECT_EQ(nlohmann::json::parse(err_of("underflow"))["error"], "runtime");
}

}  // namespace
