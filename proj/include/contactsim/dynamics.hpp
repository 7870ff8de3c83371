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

// Rigid-body kinematics and the terms of M(q) v' + k(q, v) = tau.

#ifndef CONTACTSIM_DYNAMICS_HPP_
#define CONTACTSIM_DYNAMICS_HPP_

#include <vector>

#include "contactsim/model.hpp"
#include "contactsim/types.hpp"

namespace csim {

struct BodyKinematics {
  Vec3 origin = Vec3::Zero();  // body frame origin, world
  Mat3 rotation = Mat3::Identity();
  Vec3 com = Vec3::Zero();     // world
  Vec3 angular_velocity = Vec3::Zero();
  Vec3 com_velocity = Vec3::Zero();
  // Velocity-product accelerations (the part not proportional to v').
  Vec3 angular_bias = Vec3::Zero();
  Vec3 com_bias = Vec3::Zero();
};

// Joint data expressed in the world frame.
struct JointKinematics {
  Vec3 axis = Vec3::UnitZ();
  Vec3 anchor = Vec3::Zero();
};

struct Kinematics {
  std::vector<BodyKinematics> bodies;
  std::vector<JointKinematics> joints;
};

// Poses for all bodies; velocity and bias terms only when `v` is non-null.
Kinematics compute_kinematics(const Model& model, const VecX& q, const VecX* v = nullptr);

// Compact Jacobians: `dofs` lists the velocity indices the body depends on and
// the returned blocks have one column per entry.
struct BodyJacobian {
  std::vector<int> dofs;
  Eigen::Matrix<double, 3, Eigen::Dynamic> linear;   // velocity of a world point
  Eigen::Matrix<double, 3, Eigen::Dynamic> angular;  // angular velocity
};

// Jacobian of a point rigidly attached to `body`, given in world coordinates.
// Fixed bodies yield empty dof lists.
BodyJacobian body_jacobian(const Model& model, const Kinematics& kin, int body,
                           const Vec3& point_world);

struct DynamicsTerms {
  MatX M;     // nv x nv, SPD
  VecX bias;  // k: Coriolis, gyroscopic and gravity terms
  MatX N;     // nq x nv kinematic map
};

DynamicsTerms dynamics_terms(const Model& model, const VecX& q, const VecX& v);
MatX kinematic_map(const Model& model, const VecX& q);

// Kinetic plus gravitational potential energy (no contact energy).
double mechanical_energy(const Model& model, const VecX& q, const VecX& v);

void normalize_quaternions(const Model& model, VecX& q);

// q + dt N(q) v_next, quaternions renormalized.
VecX advance_positions(const Model& model, const VecX& q, const VecX& v_next, double dt);

// q + dt/2 N_bar (v + v_next), quaternions renormalized.
VecX advance_positions_trapezoid(const Model& model, const VecX& q, const VecX& v,
                                 const VecX& v_next, double dt, const MatX& N_bar);

Mat3 skew(const Vec3& w);
Mat3 rotation_from_q(const VecX& q, int start);  // normalizes the block first

}  // namespace csim

#endif  // CONTACTSIM_DYNAMICS_HPP_
