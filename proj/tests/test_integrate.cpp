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

#include <cmath>

#include "contactsim/icf.hpp"
#include "contactsim/integrate.hpp"
#include "contactsim/scenarios.hpp"
#include "test_util.hpp"

namespace csim {
namespace {

StepContext context(const Model& m, HessianCache* cache) {
  StepContext ctx;
  ctx.model = &m;
  ctx.cache = cache;
  ctx.solver.tolerance = 1e-12;
  return ctx;
}

SimState initial(const Model& m) { return SimState{0.0, m.q0, m.v0, VecX()}; }

TEST(ErrorNorm, Examples) {
  VecX q(2), qh(2);
  q << 1.0, 2.0;
  EXPECT_EQ(error_norm(q, q, VecX()), 0.0);
  qh << 1.0 - 0.001, 2.0 + 0.002;
  EXPECT_NEAR(error_norm(q, qh, VecX()), 0.002, 1e-15);
  VecX w(2);
  w << 5.0, 0.1;
  EXPECT_NEAR(error_norm(q, qh, w), 0.005, 1e-15);
}

TEST(StepSize, ShrinksOnLargeError) {
  IntegratorConfig c;
  c.max_step = 1.0;
  EXPECT_NEAR(adjust_step_size(0.01, 8e-3, 1e-3, 2, c), 0.9 * 0.01 * std::sqrt(1.0 / 8.0), 1e-15);
}

TEST(StepSize, DeadbandKeepsStep) {
  IntegratorConfig c;
  // Candidate ratio 0.9 (eps/e)^(1/2) = 1.05.
  const double e = 1e-3 * std::pow(0.9 / 1.05, 2);
  EXPECT_EQ(adjust_step_size(0.01, e, 1e-3, 2, c), 0.01);
}

TEST(StepSize, GrowthCaps) {
  IntegratorConfig c;
  c.max_step = 0.1;
  EXPECT_NEAR(adjust_step_size(0.01, 1e-12, 1e-3, 2, c), 0.05, 1e-15);
  EXPECT_NEAR(adjust_step_size(0.05, 1e-12, 1e-3, 2, c), 0.1, 1e-15);
  EXPECT_NEAR(adjust_step_size(0.01, 0.0, 1e-3, 2, c), 0.05, 1e-15);
}

TEST(SolverTolerance, AdaptiveAndFixed) {
  IntegratorConfig c;
  c.accuracy = 1e-2;
  EXPECT_NEAR(solver_tolerance(c), 1e-5, 1e-20);
  c.accuracy = 1e-7;
  EXPECT_EQ(solver_tolerance(c), 1e-8);
  c.fixed_step = 1e-3;
  c.accuracy = 1e-1;
  EXPECT_EQ(solver_tolerance(c), 1e-8);
}

TEST(IcfStep, FreeFlightIsSymplecticEuler) {
  const Model m = assemble_model(testing::projectile(Vec3(1.0, 0.0, 2.0)));
  HessianCache cache;
  const IcfStepResult r = icf_step(context(m, &cache), initial(m), 0.1);
  EXPECT_LT((r.next.v.head<3>() - Vec3(1.0, 0.0, 2.0 - 0.981)).norm(), 1e-10);
  EXPECT_LT((r.next.q.head<3>() - (Vec3(0, 0, 10) + 0.1 * Vec3(1.0, 0.0, 2.0 - 0.981))).norm(),
            1e-10);
}

TEST(IcfStep, RestingSphereStaticBalance) {
  ContactMaterial mat;
  mat.stiffness = 1e4;
  const double depth = 9.81 / mat.stiffness;
  const Model m = assemble_model(testing::sphere_on_ground(0.1 - depth, mat));
  HessianCache cache;
  const double dt = 1e-2;
  const IcfStepResult r = icf_step(context(m, &cache), initial(m), dt);
  EXPECT_LT(r.next.v.norm(), 1e-6);
  EXPECT_NEAR(r.contact_impulse[2], dt * 9.81, 1e-6);
}

TEST(IcfStep, ImpactDoesNotPassThrough) {
  ContactMaterial mat;
  mat.stiffness = 1e5;
  ScenarioSpec s = testing::sphere_on_ground(0.1, mat);
  s.bodies[1].velocity = Vec3(0, 0, -5.0);
  const Model m = assemble_model(s);
  HessianCache cache;
  SimState x = initial(m);
  double min_z = 1.0;
  for (int i = 0; i < 50; ++i) {
    x = icf_step(context(m, &cache), x, 1e-2).next;
    min_z = std::min(min_z, x.q[2]);
  }
  // Penetration bounded by the elastic scale of the impact, far from the radius.
  EXPECT_GT(min_z, 0.1 - 5.0 * std::sqrt(1.0 / mat.stiffness));
}

TEST(Schemes, TwoGeometryQueriesPerAttempt) {
  const Model m = assemble_model(builtin_scenario("ball_drop"));
  HessianCache cache;
  const StepContext ctx = context(m, &cache);
  EXPECT_EQ(step_doubling(ctx, initial(m), 1e-2).geometry_queries, 2);
  EXPECT_EQ(trapezoid_step(ctx, initial(m), 1e-2, VecX::Zero(m.nv)).geometry_queries, 2);
}

TEST(Schemes, AtRestWithoutForcesStaysPut) {
  ScenarioSpec s = testing::projectile(Vec3::Zero());
  s.gravity = Vec3::Zero();
  const Model m = assemble_model(s);
  HessianCache cache;
  const EstimatedStep r = trapezoid_step(context(m, &cache), initial(m), 0.1, VecX::Zero(m.nv));
  EXPECT_EQ((r.next.q - m.q0).norm(), 0.0);
  EXPECT_EQ(r.next.v.norm(), 0.0);
}

TEST(Schemes, SmoothErrorEstimateIsSecondOrder) {
  // Flight of a pendulum: ||x - x_hat|| shrinks 4x per halving of dt.
  const Model m = assemble_model(builtin_scenario("pendulum"));
  HessianCache cache;
  const StepContext ctx = context(m, &cache);
  double prev = 0.0;
  for (double dt : {0.04, 0.02, 0.01}) {
    const EstimatedStep r = step_doubling(ctx, initial(m), dt);
    const double e = error_norm(r.next.q, r.q_low, VecX());
    if (prev > 0.0) EXPECT_NEAR(std::log2(prev / e), 2.0, 0.15);
    prev = e;
  }
}

TEST(Advance, ProjectileGrowsToMaxStepWithoutRejections) {
  // Uniform motion has zero local error in every scheme.
  ScenarioSpec s = testing::projectile(Vec3(1.0, 0.0, 0.0));
  s.gravity = Vec3::Zero();
  s.duration = 2.0;
  const Model m = assemble_model(s);
  IntegratorConfig c = m.integrator;
  c.accuracy = 1e-3;
  const Trajectory t = advance(m, c);
  EXPECT_EQ(t.totals.rejected, 0);
  EXPECT_NEAR(t.totals.max_step, c.max_step, 1e-15);
  EXPECT_NEAR(t.accepted_time, 2.0, 1e-12);
}

TEST(Advance, FixedStepCountAndNoRejections) {
  const Model m = assemble_model(builtin_scenario("ball_drop"));
  IntegratorConfig c = m.integrator;
  c.fixed_step = 1e-2;
  const Trajectory t = advance(m, c);
  EXPECT_EQ(t.totals.accepted, static_cast<long>(std::llround(m.duration / 1e-2)));
  EXPECT_EQ(t.totals.rejected, 0);
}

TEST(Advance, AcceptedStepsSumToDuration) {
  for (const char* name : {"ball_drop", "bouncing_ball_energy", "stiff_pd"}) {
    const Model m = assemble_model(builtin_scenario(name));
    IntegratorConfig c = m.integrator;
    c.accuracy = 1e-3;
    for (Scheme s : {Scheme::kCenic1, Scheme::kCenic2}) {
      c.scheme = s;
      const Trajectory t = advance(m, c);
      EXPECT_NEAR(t.accepted_time, m.duration, 1e-12) << name;
      EXPECT_EQ(t.totals.accepted + t.totals.rejected, t.totals.attempted);
      for (const StepRecord& r : t.records) {
        EXPECT_GE(r.error, 0.0);
        EXPECT_EQ(r.accepted, r.error <= c.accuracy);
      }
    }
  }
}

TEST(Advance, BallRestsAtStaticDepth) {
  const Model m = assemble_model(builtin_scenario("ball_drop"));
  IntegratorConfig c = m.integrator;
  c.accuracy = 1e-4;
  const Trajectory t = advance(m, c, AdvanceOptions{.duration = 3.0});
  EXPECT_NEAR(t.final_state.q[2], 0.1 - 9.81 / 1e4, 1e-5);
}

TEST(Advance, PositionNormTakesFewerSteps) {
  const Model m = assemble_model(builtin_scenario("ball_drop"));
  IntegratorConfig c = m.integrator;
  c.accuracy = 1e-3;
  c.error_norm = ErrorNormKind::kPosition;
  const long pos = advance(m, c).totals.attempted;
  c.error_norm = ErrorNormKind::kFullState;
  const long full = advance(m, c).totals.attempted;
  EXPECT_LT(pos, full);
}

TEST(Advance, DeterministicSamples) {
  const Model m = assemble_model(builtin_scenario("soft_clutter", 9));
  IntegratorConfig c = m.integrator;
  c.accuracy = 1e-2;
  const AdvanceOptions opt{.duration = 0.2, .sample_rate = 50.0};
  const Trajectory a = advance(m, c, opt), b = advance(m, c, opt);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_EQ(a.samples[i].t, b.samples[i].t);
    EXPECT_EQ((a.samples[i].q - b.samples[i].q).norm(), 0.0);
    EXPECT_EQ((a.samples[i].v - b.samples[i].v).norm(), 0.0);
  }
}

TEST(Advance, SampleGridHasRequestedTimes) {
  const Model m = assemble_model(builtin_scenario("ball_drop"));
  const Trajectory t = advance(m, m.integrator, AdvanceOptions{.duration = 1.0, .sample_rate = 100.0});
  ASSERT_EQ(t.samples.size(), 101u);
  for (size_t i = 0; i < t.samples.size(); ++i)
    EXPECT_EQ(t.samples[i].t, static_cast<double>(i) / 100.0);
  EXPECT_NEAR(t.samples.back().q[3], 1.0, 1e-12);
}

TEST(Advance, UnreachableAccuracyUnderflows) {
  const Model m = assemble_model(builtin_scenario("ball_drop"));
  IntegratorConfig c = m.integrator;
  c.accuracy = 1e-40;
  EXPECT_THROW(advance(m, c), RuntimeFailure);
}

TEST(Advance, BaselinesRejectJointLimits) {
  const Model m = assemble_model(builtin_scenario("stiff_pd"));
  IntegratorConfig c = m.integrator;
  for (Scheme s : {Scheme::kImplicitEuler, Scheme::kRk3}) {
    c.scheme = s;
    EXPECT_THROW(advance(m, c), ConfigurationError);
  }
}

TEST(Advance, BudgetStopsRun) {
  const Model m = assemble_model(builtin_scenario("ball_drop"));
  AdvanceOptions o;
  o.max_attempts = 5;
  const Trajectory t = advance(m, m.integrator, o);
  EXPECT_EQ(t.status, RunStatus::kBudgetExceeded);
  EXPECT_EQ(t.totals.attempted, 5);
}

TEST(Advance, EveryBuiltinRunsBriefly) {
  for (const std::string& name : builtin_scenario_names()) {
    const Model m = assemble_model(builtin_scenario(name));
    IntegratorConfig c = m.integrator;
    c.scheme = Scheme::kCenic1;
    c.accuracy = 1e-2;
    const Trajectory t = advance(m, c, AdvanceOptions{.duration = 0.1});
    EXPECT_EQ(t.status, RunStatus::kOk) << name;
    EXPECT_NEAR(t.accepted_time, 0.1, 1e-12) << name;
    EXPECT_TRUE(t.final_state.q.allFinite() && t.final_state.v.allFinite()) << name;
  }
}

TEST(Advance, TrapezoidIsSecondOrderOnPendulum) {
  const Model m = assemble_model(builtin_scenario("pendulum"));
  IntegratorConfig ref = m.integrator;
  ref.scheme = Scheme::kRk3;
  ref.accuracy = 1e-12;
  ref.max_step = 1e-3;
  const AdvanceOptions opt{.duration = 1.0, .sample_rate = 10.0};
  const Trajectory exact = advance(m, ref, opt);
  auto global_error = [&](Scheme s, double dt) {
    IntegratorConfig c = m.integrator;
    c.scheme = s;
    c.fixed_step = dt;
    const Trajectory t = advance(m, c, opt);
    return std::abs(t.samples.back().q[0] - exact.samples.back().q[0]);
  };
  const double slope2 =
      std::log2(global_error(Scheme::kCenic2, 0.02) / global_error(Scheme::kCenic2, 0.01));
  const double slope1 =
      std::log2(global_error(Scheme::kCenic1, 0.02) / global_error(Scheme::kCenic1, 0.01));
  EXPECT_NEAR(slope2, 2.0, 0.3);
  EXPECT_NEAR(slope1, 1.0, 0.3);
}

}  // namespace
}  // namespace csim
