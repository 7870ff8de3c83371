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

#include "contactsim/dynamics.hpp"

#include <Eigen/Geometry>

namespace csim {

Mat3 skew(const Vec3& w) {
  Mat3 s;
  s << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
  return s;
}

Mat3 rotation_from_q(const VecX& q, int start) {
  Quat quat(q[start], q[start + 1], q[start + 2], q[start + 3]);
  return quat.normalized().toRotationMatrix();
}

Kinematics compute_kinematics(const Model& model, const VecX& q, const VecX* v) {
  Kinematics kin;
  kin.bodies.resize(model.bodies.size());
  kin.joints.resize(model.joints.size());

  for (size_t b = 0; b < model.bodies.size(); ++b) {
    const Body& body = model.bodies[b];
    BodyKinematics& bk = kin.bodies[b];
    if (body.kind == BodyKind::kFixed) {
      bk.origin = body.fixed_position;
      bk.rotation = body.fixed_orientation.toRotationMatrix();
      bk.com = bk.origin;
    } else if (body.kind == BodyKind::kFree) {
      bk.origin = q.segment<3>(body.q_start);
      bk.rotation = rotation_from_q(q, body.q_start + 3);
      bk.com = bk.origin;
      if (v) {
        bk.com_velocity = v->segment<3>(body.v_start);
        bk.angular_velocity = v->segment<3>(body.v_start + 3);
      }
    }
  }

  // Serial chains, parents first. Origin velocity/bias of the joint frame are
  // tracked alongside the COM quantities.
  std::vector<Vec3> origin_vel(model.bodies.size(), Vec3::Zero());
  std::vector<Vec3> origin_bias(model.bodies.size(), Vec3::Zero());
  for (int ji : model.joint_order) {
    const Joint& j = model.joints[ji];
    Vec3 p_parent = Vec3::Zero();
    Mat3 r_parent = Mat3::Identity();
    Vec3 w_parent = Vec3::Zero(), alpha_parent = Vec3::Zero();
    Vec3 v_parent = Vec3::Zero(), a_parent = Vec3::Zero();
    if (j.parent >= 0) {
      const BodyKinematics& pk = kin.bodies[j.parent];
      p_parent = pk.origin;
      r_parent = pk.rotation;
      w_parent = pk.angular_velocity;
      alpha_parent = pk.angular_bias;
      v_parent = origin_vel[j.parent];
      a_parent = origin_bias[j.parent];
    }
    const double qj = q[j.q_index];
    const double qd = v ? (*v)[j.v_index] : 0.0;
    const Vec3 axis_w = r_parent * j.axis;
    JointKinematics& jk = kin.joints[ji];
    jk.axis = axis_w;

    BodyKinematics& ck = kin.bodies[j.child];
    Vec3 r;  // parent origin -> child origin
    if (j.kind == JointKind::kRevolute) {
      r = r_parent * j.origin;
      ck.rotation = r_parent * Eigen::AngleAxisd(qj, j.axis).toRotationMatrix();
      ck.angular_velocity = w_parent + axis_w * qd;
      ck.angular_bias = alpha_parent + w_parent.cross(axis_w * qd);
      origin_vel[j.child] = v_parent + w_parent.cross(r);
      origin_bias[j.child] = a_parent + alpha_parent.cross(r) + w_parent.cross(w_parent.cross(r));
    } else {
      r = r_parent * (j.origin + j.axis * qj);
      ck.rotation = r_parent;
      ck.angular_velocity = w_parent;
      ck.angular_bias = alpha_parent;
      origin_vel[j.child] = v_parent + w_parent.cross(r) + axis_w * qd;
      origin_bias[j.child] = a_parent + alpha_parent.cross(r) + w_parent.cross(w_parent.cross(r)) +
                             2.0 * w_parent.cross(axis_w * qd);
    }
    ck.origin = p_parent + r;
    jk.anchor = ck.origin;
    const Vec3 rc = ck.rotation * model.bodies[j.child].com;
    ck.com = ck.origin + rc;
    ck.com_velocity = origin_vel[j.child] + ck.angular_velocity.cross(rc);
    ck.com_bias = origin_bias[j.child] + ck.angular_bias.cross(rc) +
                  ck.angular_velocity.cross(ck.angular_velocity.cross(rc));
  }
  return kin;
}

BodyJacobian body_jacobian(const Model& model, const Kinematics& kin, int body,
                           const Vec3& point_world) {
  BodyJacobian jac;
  const Body& b = model.bodies[body];
  if (b.kind == BodyKind::kFixed) {
    jac.linear.resize(3, 0);
    jac.angular.resize(3, 0);
    return jac;
  }
  if (b.kind == BodyKind::kFree) {
    jac.dofs.resize(6);
    for (int i = 0; i < 6; ++i) jac.dofs[i] = b.v_start + i;
    jac.linear.resize(3, 6);
    jac.angular.resize(3, 6);
    jac.linear.leftCols<3>().setIdentity();
    jac.linear.rightCols<3>() = -skew(point_world - kin.bodies[body].origin);
    jac.angular.leftCols<3>().setZero();
    jac.angular.rightCols<3>().setIdentity();
    return jac;
  }
  const std::vector<int>& chain = model.joints[b.joint].ancestors;
  const int n = static_cast<int>(chain.size());
  jac.dofs.resize(n);
  jac.linear.resize(3, n);
  jac.angular.resize(3, n);
  for (int c = 0; c < n; ++c) {
    const Joint& j = model.joints[chain[c]];
    const JointKinematics& jk = kin.joints[chain[c]];
    jac.dofs[c] = j.v_index;
    if (j.kind == JointKind::kRevolute) {
      jac.linear.col(c) = jk.axis.cross(point_world - jk.anchor);
      jac.angular.col(c) = jk.axis;
    } else {
      jac.linear.col(c) = jk.axis;
      jac.angular.col(c).setZero();
    }
  }
  return jac;
}

MatX kinematic_map(const Model& model, const VecX& q) {
  MatX N = MatX::Zero(model.nq, model.nv);
  for (const Body& b : model.bodies) {
    if (b.kind == BodyKind::kFree) {
      N.block<3, 3>(b.q_start, b.v_start).setIdentity();
      const double w = q[b.q_start + 3], x = q[b.q_start + 4], y = q[b.q_start + 5],
                   z = q[b.q_start + 6];
      // d/dt quat = 1/2 (0, omega) * quat with omega in the world frame.
      Eigen::Matrix<double, 4, 3> e;
      e << -x, -y, -z,
            w,  z, -y,
           -z,  w,  x,
            y, -x,  w;
      N.block<4, 3>(b.q_start + 3, b.v_start + 3) = 0.5 * e;
    } else if (b.kind == BodyKind::kJointed) {
      N(b.q_start, b.v_start) = 1.0;
    }
  }
  return N;
}

DynamicsTerms dynamics_terms(const Model& model, const VecX& q, const VecX& v) {
  DynamicsTerms out;
  out.M = MatX::Zero(model.nv, model.nv);
  out.bias = VecX::Zero(model.nv);
  out.N = kinematic_map(model, q);
  const Kinematics kin = compute_kinematics(model, q, &v);

  for (size_t bi = 0; bi < model.bodies.size(); ++bi) {
    const Body& b = model.bodies[bi];
    if (b.kind == BodyKind::kFixed) continue;
    const BodyKinematics& bk = kin.bodies[bi];
    const Mat3 inertia_w = bk.rotation * b.inertia.asDiagonal() * bk.rotation.transpose();
    const Vec3 iw = inertia_w * bk.angular_velocity;
    const Vec3 lin_force = b.mass * (bk.com_bias - model.gravity);
    const Vec3 ang_force = inertia_w * bk.angular_bias + bk.angular_velocity.cross(iw);

    if (b.kind == BodyKind::kFree) {
      const int s = b.v_start;
      out.M.block<3, 3>(s, s) = b.mass * Mat3::Identity();
      out.M.block<3, 3>(s + 3, s + 3) = inertia_w;
      out.bias.segment<3>(s) = lin_force;
      out.bias.segment<3>(s + 3) = ang_force;
      continue;
    }
    // Kane projection over the chain's dofs.
    const BodyJacobian jac = body_jacobian(model, kin, static_cast<int>(bi), bk.com);
    const MatX m_local = b.mass * jac.linear.transpose() * jac.linear +
                         jac.angular.transpose() * inertia_w * jac.angular;
    const VecX k_local = jac.linear.transpose() * lin_force + jac.angular.transpose() * ang_force;
    for (size_t r = 0; r < jac.dofs.size(); ++r) {
      out.bias[jac.dofs[r]] += k_local[r];
      for (size_t c = 0; c < jac.dofs.size(); ++c) out.M(jac.dofs[r], jac.dofs[c]) += m_local(r, c);
    }
  }
  return out;
}

double mechanical_energy(const Model& model, const VecX& q, const VecX& v) {
  const Kinematics kin = compute_kinematics(model, q, &v);
  double e = 0.0;
  for (size_t bi = 0; bi < model.bodies.size(); ++bi) {
    const Body& b = model.bodies[bi];
    if (b.kind == BodyKind::kFixed) continue;
    const BodyKinematics& bk = kin.bodies[bi];
    const Mat3 inertia_w = bk.rotation * b.inertia.asDiagonal() * bk.rotation.transpose();
    e += 0.5 * b.mass * bk.com_velocity.squaredNorm() +
         0.5 * bk.angular_velocity.dot(inertia_w * bk.angular_velocity) -
         b.mass * model.gravity.dot(bk.com);
  }
  return e;
}

void normalize_quaternions(const Model& model, VecX& q) {
  for (const Body& b : model.bodies) {
    if (b.kind != BodyKind::kFree) continue;
    auto block = q.segment<4>(b.q_start + 3);
    const double n = block.norm();
    if (n > 0.0) block /= n;
  }
}

VecX advance_positions(const Model& model, const VecX& q, const VecX& v_next, double dt) {
  VecX out = q + dt * (kinematic_map(model, q) * v_next);
  normalize_quaternions(model, out);
  return out;
}

VecX advance_positions_trapezoid(const Model& model, const VecX& q, const VecX& v,
                                 const VecX& v_next, double dt, const MatX& N_bar) {
  VecX out = q + 0.5 * dt * (N_bar * (v + v_next));
  normalize_quaternions(model, out);
  return out;
}

}  // namespace csim
