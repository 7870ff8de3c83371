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

#include "contactsim/dynamics.hpp"
#include "contactsim/scenarios.hpp"
#include "test_util.hpp"

namespace csim {
namespace {

// Three-link chain mixing prismatic and revolute joints, off-axis COMs.
ScenarioSpec mixed_chain() {
  ScenarioSpec s;
  s.name = "chain";
  const JointKind kinds[3] = {JointKind::kRevolute, JointKind::kPrismatic, JointKind::kRevolute};
  const Vec3 axes[3] = {Vec3(0, 1, 0), Vec3(1, 0, 0).normalized(), Vec3(0, 0.6, 0.8)};
  for (int i = 0; i < 3; ++i) {
    BodySpec b;
    b.name = "l" + std::to_string(i);
    b.kind = BodyKind::kJointed;
    b.mass = 1.0 + 0.5 * i;
    b.inertia = Vec3(0.02 + 0.01 * i, 0.03, 0.015);
    b.com = Vec3(0.1, 0.05 * i, -0.2);
    s.bodies.push_back(b);
    JointSpec j;
    j.name = "j" + std::to_string(i);
    j.kind = kinds[i];
    j.parent = i == 0 ? "world" : "l" + std::to_string(i - 1);
    j.child = b.name;
    j.origin = i == 0 ? Vec3::Zero() : Vec3(0.0, 0.1, -0.4);
    j.axis = axes[i];
    s.joints.push_back(j);
  }
  return s;
}

// Kinetic energy from finite differences of body poses, independent of the
// Jacobians used to build M.
double kinetic_energy_fd(const Model& m, const VecX& q, const VecX& v) {
  const double h = 1e-6;
  const Kinematics kp = compute_kinematics(m, q + h * v);
  const Kinematics km = compute_kinematics(m, q - h * v);
  double T = 0.0;
  for (size_t b = 0; b < m.bodies.size(); ++b) {
    if (m.bodies[b].kind == BodyKind::kFixed) continue;
    const Vec3 vc = (kp.bodies[b].com - km.bodies[b].com) / (2 * h);
    const Mat3 dR = (kp.bodies[b].rotation - km.bodies[b].rotation) / (2 * h);
    const Mat3 R = 0.5 * (kp.bodies[b].rotation + km.bodies[b].rotation);
    const Mat3 W = dR * R.transpose();
    const Vec3 w(W(2, 1), W(0, 2), W(1, 0));
    const Mat3 Iw = R * m.bodies[b].inertia.asDiagonal() * R.transpose();
    T += 0.5 * m.bodies[b].mass * vc.squaredNorm() + 0.5 * w.dot(Iw * w);
  }
  return T;
}

TEST(Dynamics, PendulumClosedForm) {
  const Model m = assemble_model(builtin_scenario("pendulum"));
  for (double q : {0.0, 0.3, 1.0, -2.0}) {
    VecX qv(1), vv = VecX::Zero(1);
    qv << q;
    const DynamicsTerms d = dynamics_terms(m, qv, vv);
    EXPECT_NEAR(d.M(0, 0), 1e-3 + 1.0 * 0.25, 1e-12);
    EXPECT_NEAR(d.bias[0], 1.0 * 9.81 * 0.5 * std::sin(q), 1e-12);
  }
}

TEST(Dynamics, FreeBodyMassAndGyroscopicTerm) {
  ScenarioSpec s = testing::sphere_on_ground(1.0, {}, 2.0);
  s.bodies[1].inertia = Vec3(0.1, 0.2, 0.3);
  s.bodies[1].orientation = Quat(Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()));
  const Model m = assemble_model(s);
  VecX v(6);
  v << 0.1, 0.2, 0.3, 1.0, -2.0, 0.5;
  const DynamicsTerms d = dynamics_terms(m, m.q0, v);
  const Mat3 R = rotation_from_q(m.q0, 3);
  const Mat3 Iw = R * Vec3(0.1, 0.2, 0.3).asDiagonal() * R.transpose();
  EXPECT_LT((d.M.topLeftCorner<3, 3>() - 2.0 * Mat3::Identity()).norm(), 1e-12);
  EXPECT_LT((d.M.bottomRightCorner<3, 3>() - Iw).norm(), 1e-12);
  const Vec3 w = v.tail<3>();
  EXPECT_LT((d.bias.tail<3>() - w.cross(Iw * w)).norm(), 1e-12);
  EXPECT_LT((d.bias.head<3>() - Vec3(0, 0, 2.0 * 9.81)).norm(), 1e-12);
}

TEST(Dynamics, MassMatrixMatchesKineticEnergy) {
  const ScenarioSpec s = mixed_chain();
  const Model m = assemble_model(s);
  VecX q(3);
  q << 0.4, 0.2, -0.9;
  const DynamicsTerms d = dynamics_terms(m, q, VecX::Zero(3));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const VecX ei = VecX::Unit(3, i), ej = VecX::Unit(3, j);
      // Polarization: e_i^T M e_j = T(e_i + e_j) - T(e_i) - T(e_j).
      const double mij = kinetic_energy_fd(m, q, ei + ej) - kinetic_energy_fd(m, q, ei) -
                         kinetic_energy_fd(m, q, ej);
      EXPECT_NEAR(d.M(i, j), mij, 1e-6);
    }
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<MatX>(d.M).eigenvalues().minCoeff(), 0.0);
}

TEST(Dynamics, BiasMatchesLagrangian) {
  // k = Mdot v - 1/2 d(v^T M v)/dq + dV/dq for joint coordinates.
  const Model m = assemble_model(mixed_chain());
  VecX q(3), v(3);
  q << 0.4, 0.2, -0.9;
  v << 1.3, -0.7, 2.1;
  const double h = 1e-6;
  auto M_at = [&](const VecX& x) { return dynamics_terms(m, x, VecX::Zero(3)).M; };
  MatX Mdot = MatX::Zero(3, 3);
  VecX dT(3);
  for (int k = 0; k < 3; ++k) {
    const VecX e = VecX::Unit(3, k);
    const MatX dM = (M_at(q + h * e) - M_at(q - h * e)) / (2 * h);
    Mdot += dM * v[k];
    dT[k] = 0.5 * v.dot(dM * v);
  }
  auto potential = [&](const VecX& x) {
    return mechanical_energy(m, x, VecX::Zero(3));
  };
  const VecX dV = testing::fd_gradient(potential, q, 1e-6);
  const VecX expected = Mdot * v - dT + dV;
  const VecX bias = dynamics_terms(m, q, v).bias;
  EXPECT_LT((bias - expected).norm(), 1e-6 * std::max(1.0, expected.norm()));
}

TEST(Dynamics, KinematicMapMatchesQuaternionRate) {
  ScenarioSpec s = testing::sphere_on_ground(1.0);
  s.bodies[1].orientation = Quat(Eigen::AngleAxisd(1.1, Vec3(0, 1, 1).normalized()));
  const Model m = assemble_model(s);
  VecX v(6);
  v << 0.5, -0.1, 0.2, 0.3, 0.7, -1.2;
  const MatX N = kinematic_map(m, m.q0);
  const Quat q0(m.q0[3], m.q0[4], m.q0[5], m.q0[6]);
  const Vec3 w = v.tail<3>();
  // Quaternion rate for a world-frame angular velocity: qdot = 1/2 [0, w] * q.
  const Quat wq(0.0, w.x(), w.y(), w.z());
  const Quat qdot = wq * q0;
  const VecX rate = N * v;
  EXPECT_NEAR(rate[3], 0.5 * qdot.w(), 1e-12);
  EXPECT_NEAR(rate[4], 0.5 * qdot.x(), 1e-12);
  EXPECT_NEAR(rate[5], 0.5 * qdot.y(), 1e-12);
  EXPECT_NEAR(rate[6], 0.5 * qdot.z(), 1e-12);
  EXPECT_LT((rate.head<3>() - v.head<3>()).norm(), 1e-15);
}

TEST(Dynamics, AdvancePositionsKeepsUnitQuaternions) {
  const Model m = assemble_model(testing::sphere_on_ground(1.0));
  VecX v(6);
  v << 0, 0, 0, 10, 20, 30;
  const VecX q = advance_positions(m, m.q0, v, 0.1);
  EXPECT_NEAR(q.segment<4>(3).norm(), 1.0, 1e-15);
}

TEST(Dynamics, EnergyOfRestingFreeBody) {
  const Model m = assemble_model(testing::sphere_on_ground(2.0, {}, 3.0));
  EXPECT_NEAR(mechanical_energy(m, m.q0, VecX::Zero(6)), 3.0 * 9.81 * 2.0, 1e-12);
}

}  // namespace
}  // namespace csim
