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
#include <random>

#include "contactsim/solver.hpp"
#include "problem_gen.hpp"
#include "test_util.hpp"

namespace csim {
namespace {

// Golden-section minimizer of a unimodal function on [a, b].
double golden_section(const std::function<double(double)>& f, double a, double b) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < 200 && b - a > 1e-14; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

TEST(Cost, GradientAndHessianMatchFiniteDifferences) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const ConvexProblem p = testing::random_problem(rng, 1e-2);
    VecX v(p.size());
    for (int i = 0; i < v.size(); ++i) v[i] = u(rng);
    auto cost = [&](const VecX& x) { return evaluate_cost(p, x); };
    auto grad = [&](const VecX& x) { return evaluate_gradient(p, x); };
    const VecX g = evaluate_gradient(p, v);
    EXPECT_LT(testing::relative_error(g, testing::fd_gradient(cost, v, 1e-7)), 1e-5);
    const MatX H = evaluate_hessian(p, v);
    const MatX H_fd = testing::fd_jacobian(grad, v, 1e-7);
    EXPECT_LT((H - H_fd).norm() / std::max(1.0, H_fd.norm()), 1e-4);
  }
}

TEST(Linesearch, MatchesGoldenSection) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const ConvexProblem p = testing::random_problem(rng, 1e-2);
    VecX v(p.size());
    for (int i = 0; i < v.size(); ++i) v[i] = u(rng);
    const VecX dir = -evaluate_hessian(p, v).llt().solve(evaluate_gradient(p, v));
    for (LinesearchInit init : {LinesearchInit::kCubic, LinesearchInit::kFixed}) {
      const LinesearchResult ls = exact_linesearch(p, v, dir, 1.5, init);
      const double alpha_gs =
          golden_section([&](double a) { return evaluate_cost(p, v + a * dir); }, 0.0, 1.5);
      const double f_ls = evaluate_cost(p, v + ls.alpha * dir);
      const double f_gs = evaluate_cost(p, v + alpha_gs * dir);
      EXPECT_LE(f_ls, f_gs + 1e-10 * std::max(1.0, std::abs(f_gs))) << "trial " << trial;
    }
  }
}

TEST(Linesearch, ReturnsMaximumStepWhenStillDescending) {
  ConvexProblem p;
  p.A = MatX::Identity(2, 2);
  p.r = VecX::Constant(2, 10.0);
  const VecX v = VecX::Zero(2);
  const VecX dir = VecX::Constant(2, 1.0);  // minimizer at alpha = 10
  const LinesearchResult ls = exact_linesearch(p, v, dir, 1.5);
  EXPECT_EQ(ls.alpha, 1.5);
  EXPECT_EQ(ls.iterations, 0);
}

TEST(Solve, UnconstrainedQuadraticIsOneNewtonStep) {
  ConvexProblem p;
  p.A = MatX(2, 2);
  p.A << 4.0, 1.0, 1.0, 3.0;
  p.r = VecX(2);
  p.r << 1.0, 2.0;
  HessianCache cache;
  SolverOptions opt;
  opt.reuse_hessian = false;
  const SolveResult res = solve(p, VecX::Zero(2), opt, cache);
  EXPECT_LT((res.v - p.A.llt().solve(p.r)).norm(), 1e-12);
  EXPECT_LE(res.stats.iterations, 2);
}

TEST(Solve, OptimalityAndMonotoneCostOnRandomProblems) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const double dt = testing::log_uniform(rng, 1e-5, 1e-1);
    const ConvexProblem p = testing::random_problem(rng, dt);
    HessianCache cache;
    SolverOptions opt;
    opt.tolerance = 1e-10;
    opt.record_history = true;
    opt.reuse_hessian = trial % 2 == 0;
    const SolveResult res = solve(p, VecX::Zero(p.size()), opt, cache);
    for (size_t i = 1; i < res.stats.cost_history.size(); ++i)
      EXPECT_LE(res.stats.cost_history[i],
                res.stats.cost_history[i - 1] + 1e-12 * std::abs(res.stats.cost_history[i - 1]));
    // No random perturbation improves on the solution.
    const double f = evaluate_cost(p, res.v);
    for (int k = 0; k < 20; ++k) {
      VecX dv(p.size());
      for (int i = 0; i < dv.size(); ++i) dv[i] = 1e-4 * u(rng);
      EXPECT_GE(evaluate_cost(p, res.v + dv), f - 1e-9 * std::max(1.0, std::abs(f)));
    }
  }
}

TEST(Solve, ReuseSavesFactorizationsOnSimilarProblems) {
  std::mt19937_64 rng(4);
  ConvexProblem p = testing::random_problem(rng, 1e-3);
  SolverStats with, without;
  HessianCache c1, c2;
  SolverOptions reuse, fresh;
  reuse.reuse_hessian = true;
  fresh.reuse_hessian = false;
  VecX v1 = VecX::Zero(p.size()), v2 = v1;
  for (int step = 0; step < 20; ++step) {
    p.r *= 1.0 + 1e-3;
    SolveResult a = solve(p, v1, reuse, c1);
    SolveResult b = solve(p, v2, fresh, c2);
    with += a.stats;
    without += b.stats;
    EXPECT_LT((a.v - b.v).norm(), 1e-5 * std::max(1.0, b.v.norm()));
    v1 = a.v;
    v2 = b.v;
  }
  EXPECT_LT(with.factorizations, without.factorizations);
}

TEST(ScaledNorms, IdentityMassGivesEuclideanNorms) {
  VecX g(2), r(2), dv(2);
  g << 3.0, 4.0;
  r << 1.0, 0.0;
  dv << 0.0, 2.0;
  const ScaledNorms n = scaled_norms(VecX::Ones(2), g, r, dv);
  EXPECT_DOUBLE_EQ(n.gradient, 5.0);
  EXPECT_DOUBLE_EQ(n.rhs, 1.0);
  EXPECT_DOUBLE_EQ(n.step, 2.0);
}

}  // namespace
}  // namespace csim
