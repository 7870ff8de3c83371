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

#include <sstream>

#include "contactsim/output.hpp"
#include "contactsim/scenarios.hpp"
#include "contactsim/sweep.hpp"
#include "json.hpp"

namespace csim {
namespace {

TEST(Output, FormatNumberRoundTrips) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(-2.5e-7), "-2.4999999999999999e-07");
  for (double x : {1.0 / 3.0, 9.81, -1e-300, 6.02e23}) EXPECT_EQ(std::stod(format_number(x)), x);
}

TEST(Output, Fnv1aReferenceValues) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
}

TEST(Output, DigestIsSixteenHexDigitsAndSensitive) {
  VecX q = VecX::Ones(3), v = VecX::Zero(2);
  const std::string a = state_digest(q, v);
  EXPECT_EQ(a.size(), 16u);
  EXPECT_EQ(a.find_first_not_of("0123456789abcdef"), std::string::npos);
  q[1] = std::nextafter(1.0, 2.0);
  EXPECT_NE(state_digest(q, v), a);
}

TEST(Output, GoldenTrajectoryHeaders) {
  EXPECT_EQ(trajectory_columns(assemble_model(builtin_scenario("ball_drop"))),
            (std::vector<std::string>{"t", "ball.x", "ball.y", "ball.z", "ball.qw", "ball.qx",
                                      "ball.qy", "ball.qz", "ball.vx", "ball.vy", "ball.vz",
                                      "ball.wx", "ball.wy", "ball.wz", "e", "dt"}));
  const auto pend = trajectory_columns(assemble_model(builtin_scenario("pendulum")));
  ASSERT_EQ(pend.size(), 5u);
  EXPECT_EQ(pend.front(), "t");
  EXPECT_EQ(pend[1].substr(pend[1].size() - 2), ".q");
  EXPECT_EQ(pend[2].substr(pend[2].size() - 2), ".v");
}

TEST(Output, TrajectoryCsvShape) {
  const Model m = assemble_model(builtin_scenario("ball_drop"));
  const Trajectory t = advance(m, m.integrator, AdvanceOptions{.duration = 0.1, .sample_rate = 100.0});
  std::ostringstream os;
  write_trajectory_csv(os, m, t);
  std::istringstream is(os.str());
  std::string line;
  int rows = 0;
  while (std::getline(is, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 15);
    ++rows;
  }
  EXPECT_EQ(rows, 1 + 11);
}

TEST(Output, GoldenSweepHeader) {
  std::ostringstream os;
  write_sweep_csv(os, "x", SweepResult{}, false);
  EXPECT_EQ(os.str(),
            "scenario,scheme,accuracy,status,steps_attempted,steps_accepted,steps_rejected,"
            "geometry_queries,newton_iterations,factorizations,linesearch_iterations,"
            "final_state_digest,reference_accuracy,error_vs_reference\n");
  std::ostringstream timed;
  write_sweep_csv(timed, "x", SweepResult{}, true);
  EXPECT_NE(timed.str().find(",wall_time\n"), std::string::npos);
}

TEST(Output, ReportFields) {
  const Model m = assemble_model(builtin_scenario("ball_drop"));
  const Trajectory t = advance(m, m.integrator, AdvanceOptions{.duration = 0.05});
  const auto j = nlohmann::json::parse(run_report_json(m, m.integrator, t));
  EXPECT_EQ(j["scenario"], "ball_drop");
  EXPECT_EQ(j["status"], "ok");
  EXPECT_EQ(j["steps"]["attempted"].get<long>(), t.totals.attempted);
  EXPECT_EQ(j["final_state_digest"], state_digest(t.final_state.q, t.final_state.v));
}

TEST(Sweep, RowsInInputOrderAndDeterministic) {
  SweepOptions o;
  o.scenario = builtin_scenario("ball_drop");
  o.schemes = {Scheme::kCenic1, Scheme::kCenic2};
  o.accuracies = {1e-2, 1e-3};
  o.duration = 0.3;
  o.jobs = 3;
  const SweepResult a = run_sweep(o);
  ASSERT_EQ(a.rows.size(), 4u);
  EXPECT_EQ(a.rows[0].scheme, Scheme::kCenic1);
  EXPECT_EQ(a.rows[1].accuracy, 1e-3);
  EXPECT_EQ(a.rows[2].scheme, Scheme::kCenic2);
  std::ostringstream s1, s2;
  write_sweep_csv(s1, "ball_drop", a, false);
  o.jobs = 1;
  write_sweep_csv(s2, "ball_drop", run_sweep(o), false);
  EXPECT_EQ(s1.str(), s2.str());
  // The tightest cell of the reference scheme is the reference itself.
  ASSERT_TRUE(a.rows[1].error_vs_reference);
  EXPECT_EQ(*a.rows[1].error_vs_reference, 0.0);
}

TEST(Sweep, FailedCellIsRecordedNotFatal) {
  SweepOptions o;
  o.scenario = builtin_scenario("stiff_pd");
  o.schemes = {Scheme::kRk3, Scheme::kCenic1};
  o.accuracies = {1e-2};
  o.duration = 0.1;
  const SweepResult r = run_sweep(o);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].status, "configuration_error");
  EXPECT_EQ(r.rows[1].status, "ok");
}

}  // namespace
}  // namespace csim
