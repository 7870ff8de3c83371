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

// Narrow-phase point contact between spheres, boxes and halfspaces.

#ifndef CONTACTSIM_GEOMETRY_HPP_
#define CONTACTSIM_GEOMETRY_HPP_

#include <utility>
#include <vector>

#include "contactsim/dynamics.hpp"
#include "contactsim/model.hpp"

namespace csim {

struct ContactData {
  int pair = -1;
  int sub = 0;        // vertex index for box-halfspace, 0 otherwise
  double phi = 0.0;   // signed distance, negative when overlapping
  Vec3 normal = Vec3::UnitZ();  // from geometry b into geometry a
  Vec3 point = Vec3::Zero();    // midpoint of the overlap
  Vec3 t1 = Vec3::UnitX();
  Vec3 t2 = Vec3::UnitY();
  // Contact velocity is jacobian * v[dofs] - offset, in (t1, t2, n) order.
  Vec3 offset = Vec3::Zero();
  ContactMaterial material;
  // Moving surface of geometry b and its world rotation, for offsets at other
  // times than the query time.
  SurfaceVelocity surface;
  Mat3 surface_rotation = Mat3::Identity();
  std::vector<int> dofs;
  Eigen::Matrix<double, 3, Eigen::Dynamic> jacobian;

  Vec3 velocity(const VecX& v) const;
  // Offset with the surface velocity evaluated at time t.
  Vec3 offset_at(double t) const;
  // 3 x nv dense block.
  MatX dense_jacobian(int nv) const;
};

// t1 is the projection of +x onto the tangent plane, or of +y when
// |n . x| > 0.9 (the switch is the one discontinuity); t2 = n x t1.
std::pair<Vec3, Vec3> tangent_basis(const Vec3& n);

// All contacts with phi < margin, ordered by pair then sub index.
std::vector<ContactData> query_contacts(const Model& model, const VecX& q, double t);
std::vector<ContactData> query_contacts(const Model& model, const Kinematics& kin, double t);

}  // namespace csim

#endif  // CONTACTSIM_GEOMETRY_HPP_
