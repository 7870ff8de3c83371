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

#include "contactsim/contact.hpp"
#include "test_util.hpp"

namespace csim {
namespace {

constexpr double kPi = 3.14159265358979323846;

ContactPotentialData sample_data(double fe = 10.0, double d = 0.5) {
  ContactPotentialData c;
  c.elastic_force = fe;
  c.stiffness = 1e4;
  c.dissipation = d;
  c.dt = 1e-3;
  c.gamma_prev = 1e-2;
  c.mu_lagged = 0.6;
  c.stiction_tolerance = 1e-3;
  return c;
}

TEST(Sigmoid, ClosedForm) {
  for (double s : {-3.0, -0.5, 0.0, 0.25, 1.0, 7.0})
    EXPECT_NEAR(sigmoid(s), s / std::sqrt(1.0 + s * s), 1e-15);
  EXPECT_NEAR(sigmoid(1.0), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(FrictionCoefficient, TabulatedPoints) {
  const double ms = 1.0, md = 0.5, delta = 10.0;
  EXPECT_NEAR(friction_coefficient(0.0, ms, md, delta), ms, 1e-12);
  EXPECT_NEAR(friction_coefficient(delta, ms, md, delta), 0.5 * (ms + md), 1e-12);
  EXPECT_NEAR(friction_coefficient(2 * delta, ms, md, delta), md, 1e-12);
}

TEST(FrictionCoefficient, MonotoneWithBoundedUndershoot) {
  // Past twice the transition width the law dips slightly below mu_d.
  const double f_delta = 10.0 / std::sqrt(101.0);
  const double floor = 0.4 - 0.5 * (1.0 - 0.4) * (1.0 / f_delta - 1.0);
  double prev = friction_coefficient(0.0, 1.0, 0.4, 10.0);
  for (double s = 0.1; s < 60.0; s += 0.1) {
    const double mu = friction_coefficient(s, 1.0, 0.4, 10.0);
    EXPECT_LE(mu, prev + 1e-15);
    EXPECT_GE(mu, floor);
    prev = mu;
  }
}

TEST(NormalForce, HuntCrossleyClosedForm) {
  EXPECT_NEAR(normal_force_continuous(100.0, -2.0, 0.5), 100.0 * 2.0, 1e-12);
  EXPECT_NEAR(normal_force_continuous(100.0, 1.0, 0.5), 50.0, 1e-12);
  EXPECT_EQ(normal_force_continuous(100.0, 3.0, 0.5), 0.0);  // separating past 1/d
  EXPECT_EQ(normal_force_continuous(0.0, -1.0, 0.5), 0.0);
}

TEST(FrictionForce, ContinuousAcrossZeroSlip) {
  ContactMaterial m;
  m.mu_static = 0.8;
  m.mu_dynamic = 0.6;
  m.stiction_tolerance = 1e-3;
  const Vec2 a = friction_force_continuous(Vec2(1e-9, 0), 10.0, m);
  const Vec2 b = friction_force_continuous(Vec2(-1e-9, 0), 10.0, m);
  EXPECT_LT((a - b).norm(), 1e-4);
  const Vec2 fast = friction_force_continuous(Vec2(1.0, 0), 10.0, m);
  const double mu = friction_coefficient(1e3, 0.8, 0.6, m.transition_width);
  EXPECT_NEAR(fast.x(), -mu * 10.0 / std::sqrt(1.0 + 1e-6), 1e-9);
}

TEST(NormalImpulse, ValueAtRest) {
  const ContactPotentialData c = sample_data(25.0, 0.3);
  EXPECT_NEAR(normal_impulse(0.0, c).value, c.dt * 25.0, 1e-12);
}

TEST(NormalImpulse, ClosedFormAndClamps) {
  const ContactPotentialData c = sample_data(10.0, 0.5);
  for (double vn : {-2.0, -0.1, 0.0, 5e-4, 2e-3}) {
    const double expect = c.dt * std::max(0.0, c.elastic_force - c.dt * c.stiffness * vn) *
                          std::max(0.0, 1.0 - c.dissipation * vn);
    EXPECT_NEAR(normal_impulse(vn, c).value, expect, 1e-12);
  }
  EXPECT_EQ(normal_impulse(1.5, c).value, 0.0);  // past f_e / (dt k) = 1
  EXPECT_EQ(normal_impulse(-2.5, sample_data(10.0, 0.5)).value > 0.0, true);
  EXPECT_EQ(normal_impulse(0.5, sample_data(1e3, 0.5)).value > 0.0, true);
  EXPECT_EQ(normal_impulse(2.5, sample_data(1e3, 0.5)).value, 0.0);  // past 1 / d = 2
}

TEST(NormalPotential, MatchesQuadratureOfImpulse) {
  // l_n(v) = -int_0^v gamma_n(s) ds, checked with composite Simpson.
  const ContactPotentialData c = sample_data(10.0, 0.5);
  for (double vn : {-1.0, -0.2, 3e-4, 2e-3}) {
    const int n = 20000;
    const double h = vn / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      sum += w * normal_impulse(i * h, c).value;
    }
    const double integral = sum * h / 3.0;
    EXPECT_NEAR(normal_potential(vn, c).value, -integral, 1e-9 * std::max(1.0, std::abs(integral)));
  }
}

TEST(NormalPotential, NegativeElasticForceIsInactiveNearRest) {
  // Contacts inside the margin but separated: no impulse until approach.
  ContactPotentialData c = sample_data(-5.0, 0.5);
  EXPECT_EQ(normal_impulse(0.0, c).value, 0.0);
  EXPECT_EQ(normal_potential(0.0, c).value, 0.0);
  EXPECT_GT(normal_impulse(-1.0, c).value, 0.0);
}

TEST(NormalPotential, ImpulseNonIncreasingInNormalVelocity) {
  const ContactPotentialData c = sample_data(10.0, 0.8);
  double prev = normal_impulse(-5.0, c).value;
  for (double vn = -5.0; vn < 3.0; vn += 1e-3) {
    const double g = normal_impulse(vn, c).value;
    EXPECT_LE(g, prev + 1e-15);
    prev = g;
  }
}

TEST(ContactPotential, GradientAndHessianMatchFiniteDifferences) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    ContactPotentialData c = sample_data(5.0 + 20.0 * std::abs(u(rng)), std::abs(u(rng)));
    c.mu_lagged = 0.2 + 0.5 * std::abs(u(rng));
    const double v_max = std::min(c.elastic_force / (c.dt * c.stiffness),
                                  c.dissipation > 0 ? 1.0 / c.dissipation : 1e9);
    Vec3 v(1e-3 * u(rng), 1e-3 * u(rng), 0.0);
    do {
      v.z() = v_max * 1.5 * u(rng);
    } while (std::abs(v.z() - v_max) < 1e-4 * std::max(1.0, v_max));
    auto value = [&](const VecX& x) { return contact_potential(Vec3(x), c).value; };
    auto grad = [&](const VecX& x) -> VecX { return contact_potential(Vec3(x), c).gradient; };
    const Potential3 p = contact_potential(v, c);
    const VecX g_fd = testing::fd_gradient(value, v, 1e-8);
    EXPECT_LT(testing::relative_error(p.gradient, g_fd), 1e-6) << "trial " << trial;
    const MatX H_fd = testing::fd_jacobian(grad, v, 1e-9);
    EXPECT_LT((p.hessian - H_fd).norm() / std::max(1.0, H_fd.norm()), 1e-5) << "trial " << trial;
  }
}

TEST(ContactPotential, HessianPositiveSemidefinite) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const ContactPotentialData c = sample_data(10.0, 0.5);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 v(0.01 * u(rng), 0.01 * u(rng), 0.01 * u(rng));
    const Eigen::SelfAdjointEigenSolver<Mat3> es(contact_potential(v, c).hessian);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
  }
}

TEST(ContactPotential, StictionBound) {
  const ContactPotentialData c = sample_data();
  const Vec3 v(1e-6, 0.0, 0.0);
  const double ft = contact_potential(v, c).gradient.head<2>().norm();
  EXPECT_LE(ft, c.mu_lagged * c.gamma_prev * 1e-6 / c.stiction_tolerance + 1e-18);
}

TEST(NearRigid, ClosedForm) {
  const NearRigid nr = near_rigid_parameters(2.0, 0.1, 1e-3);
  EXPECT_NEAR(nr.stiffness, 2.0 / (4 * kPi * kPi * 0.01 * 1e-6), 1e-12 * nr.stiffness);
  EXPECT_NEAR(nr.damping_time, 0.1 * 1e-3 / kPi, 1e-18);
}

TEST(LimitPotential, InactiveInsideAndQuadraticOutside) {
  LimitData l;
  l.position = 0.0;
  l.lower = -1.0;
  l.upper = 1.0;
  l.m_eff = 1.0;
  l.dt = 1e-2;
  EXPECT_EQ(limit_potential(0.0, l).value, 0.0);
  const NearRigid nr = near_rigid_parameters(1.0, l.beta, l.dt);
  const double h = l.dt + nr.damping_time;
  const double w = l.dt * h * nr.stiffness;
  const double rate = 2.0 / h;  // overshoots the upper bound by 1/h
  EXPECT_NEAR(limit_potential(rate, l).value, 0.5 * w * std::pow(rate - 1.0 / h, 2), 1e-9 * w);
  auto f = [&](const VecX& x) { return limit_potential(x[0], l).value; };
  VecX x(1);
  x << 1.7 / h;
  EXPECT_NEAR(limit_potential(x[0], l).gradient, testing::fd_gradient(f, x, 1e-6)[0],
              1e-6 * w / h);
}

TEST(EffectiveMass, SingleRowIsInverseDelassus) {
  MatX M(2, 2);
  M << 3.0, 1.0, 1.0, 2.0;
  MatX G = MatX::Zero(1, 2);
  G(0, 0) = 1.0;
  const Eigen::LLT<MatX> llt(M);
  EXPECT_NEAR(effective_mass(G, llt), 1.0 / M.inverse()(0, 0), 1e-12);
}

}  // namespace
}  // namespace csim
