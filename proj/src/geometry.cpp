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

#include "contactsim/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace csim {
namespace {

struct GeomPose {
  Vec3 center;
  Mat3 rotation;
};

GeomPose geometry_pose(const Geometry& g, const Kinematics& kin) {
  const BodyKinematics& bk = kin.bodies[g.body];
  return {bk.origin + bk.rotation * g.position, bk.rotation * g.orientation.toRotationMatrix()};
}

// Halfspace in world coordinates: points with n.x <= offset are inside.
void world_halfspace(const Geometry& g, const Kinematics& kin, Vec3* n, double* offset) {
  const BodyKinematics& bk = kin.bodies[g.body];
  *n = bk.rotation * g.normal;
  *offset = g.offset + n->dot(bk.origin);
}

struct RawContact {
  int sub;
  double phi;
  Vec3 normal;
  Vec3 point;
};

void sphere_halfspace(const Vec3& c, double r, const Vec3& n, double offset,
                      std::vector<RawContact>* out) {
  const double phi = n.dot(c) - offset - r;
  out->push_back({0, phi, n, c - (r + 0.5 * phi) * n});
}

void sphere_sphere(const Vec3& ca, double ra, const Vec3& cb, double rb,
                   std::vector<RawContact>* out) {
  const Vec3 d = ca - cb;
  const double dist = d.norm();
  const Vec3 n = dist > 1e-12 ? Vec3(d / dist) : Vec3(Vec3::UnitZ());
  const double phi = dist - ra - rb;
  out->push_back({0, phi, n, cb + (rb + 0.5 * phi) * n});
}

void sphere_box(const Vec3& c, double r, const GeomPose& box, const Vec3& h,
                std::vector<RawContact>* out) {
  const Vec3 s = box.rotation.transpose() * (c - box.center);
  const Vec3 clamped = s.cwiseMax(-h).cwiseMin(h);
  Vec3 n_local;
  Vec3 surface_local;
  double dist;
  if ((s - clamped).squaredNorm() > 0.0) {
    const Vec3 d = s - clamped;
    dist = d.norm();
    n_local = d / dist;
    surface_local = clamped;
  } else {
    // Center inside the box: push out through the nearest face.
    int axis = 0;
    double best = h[0] - std::abs(s[0]);
    for (int i = 1; i < 3; ++i) {
      const double depth = h[i] - std::abs(s[i]);
      if (depth < best) {
        best = depth;
        axis = i;
      }
    }
    n_local = Vec3::Zero();
    n_local[axis] = s[axis] >= 0.0 ? 1.0 : -1.0;
    surface_local = s;
    surface_local[axis] = n_local[axis] * h[axis];
    dist = -best;
  }
  const Vec3 n = box.rotation * n_local;
  const Vec3 surface = box.center + box.rotation * surface_local;
  const double phi = dist - r;
  out->push_back({0, phi, n, surface + 0.5 * phi * n});
}

void box_halfspace(const GeomPose& box, const Vec3& h, const Vec3& n, double offset,
                   double margin, std::vector<RawContact>* out) {
  std::array<RawContact, 8> verts;
  for (int i = 0; i < 8; ++i) {
    const Vec3 local((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(), (i & 4) ? h.z() : -h.z());
    const Vec3 p = box.center + box.rotation * local;
    const double phi = n.dot(p) - offset;
    verts[i] = {i, phi, n, p - 0.5 * phi * n};
  }
  std::stable_sort(verts.begin(), verts.end(),
                   [](const RawContact& a, const RawContact& b) { return a.phi < b.phi; });
  std::vector<RawContact> kept;
  for (int i = 0; i < 4; ++i)
    if (verts[i].phi < margin) kept.push_back(verts[i]);
  std::sort(kept.begin(), kept.end(),
            [](const RawContact& a, const RawContact& b) { return a.sub < b.sub; });
  out->insert(out->end(), kept.begin(), kept.end());
}

}  // namespace

Vec3 ContactData::offset_at(double t) const {
  if (surface.profile == SurfaceVelocity::Profile::kNone) return offset;
  const Vec3 u = surface_rotation * surface.velocity(t);
  return Vec3(t1.dot(u), t2.dot(u), 0.0);
}

Vec3 ContactData::velocity(const VecX& v) const {
  Vec3 out = -offset;
  for (size_t c = 0; c < dofs.size(); ++c) out += jacobian.col(c) * v[dofs[c]];
  return out;
}

MatX ContactData::dense_jacobian(int nv) const {
  MatX out = MatX::Zero(3, nv);
  for (size_t c = 0; c < dofs.size(); ++c) out.col(dofs[c]) += jacobian.col(c);
  return out;
}

std::pair<Vec3, Vec3> tangent_basis(const Vec3& n) {
  const Vec3 helper = std::abs(n.x()) > 0.9 ? Vec3(Vec3::UnitY()) : Vec3(Vec3::UnitX());
  const Vec3 t1 = (helper - n.dot(helper) * n).normalized();
  return {t1, n.cross(t1)};
}

std::vector<ContactData> query_contacts(const Model& model, const VecX& q, double t) {
  return query_contacts(model, compute_kinematics(model, q), t);
}

std::vector<ContactData> query_contacts(const Model& model, const Kinematics& kin, double t) {
  std::vector<ContactData> contacts;
  std::vector<RawContact> raw;
  for (size_t p = 0; p < model.pairs.size(); ++p) {
    const Geometry& ga = model.geometries[model.pairs[p].geometry_a];
    const Geometry& gb = model.geometries[model.pairs[p].geometry_b];
    raw.clear();
    const GeomPose pa = geometry_pose(ga, kin);
    const GeomPose pb = geometry_pose(gb, kin);
    if (gb.shape == Shape::kHalfspace) {
      Vec3 n;
      double offset;
      world_halfspace(gb, kin, &n, &offset);
      if (ga.shape == Shape::kSphere) {
        sphere_halfspace(pa.center, ga.radius, n, offset, &raw);
      } else {
        box_halfspace(pa, ga.half_extents, n, offset, model.contact_margin, &raw);
      }
    } else if (gb.shape == Shape::kSphere) {
      sphere_sphere(pa.center, ga.radius, pb.center, gb.radius, &raw);
    } else {
      sphere_box(pa.center, ga.radius, pb, gb.half_extents, &raw);
    }

    for (const RawContact& rc : raw) {
      if (!(rc.phi < model.contact_margin)) continue;
      ContactData cd;
      cd.pair = static_cast<int>(p);
      cd.sub = rc.sub;
      cd.phi = rc.phi;
      cd.normal = rc.normal;
      cd.point = rc.point;
      std::tie(cd.t1, cd.t2) = tangent_basis(rc.normal);
      cd.material = combine_materials(ga.material, gb.material);
      Mat3 frame_t;
      frame_t.row(0) = cd.t1.transpose();
      frame_t.row(1) = cd.t2.transpose();
      frame_t.row(2) = cd.normal.transpose();

      // Relative velocity of a's material point with respect to b's.
      const BodyJacobian ja = body_jacobian(model, kin, ga.body, rc.point);
      const BodyJacobian jb = body_jacobian(model, kin, gb.body, rc.point);
      cd.dofs = ja.dofs;
      for (int d : jb.dofs)
        if (std::find(cd.dofs.begin(), cd.dofs.end(), d) == cd.dofs.end()) cd.dofs.push_back(d);
      Eigen::Matrix<double, 3, Eigen::Dynamic> world(3, cd.dofs.size());
      world.setZero();
      auto col_of = [&](int dof) {
        return static_cast<int>(std::find(cd.dofs.begin(), cd.dofs.end(), dof) - cd.dofs.begin());
      };
      for (size_t c = 0; c < ja.dofs.size(); ++c) world.col(col_of(ja.dofs[c])) += ja.linear.col(c);
      for (size_t c = 0; c < jb.dofs.size(); ++c) world.col(col_of(jb.dofs[c])) -= jb.linear.col(c);
      cd.jacobian = frame_t * world;

      if (gb.surface_velocity.profile != SurfaceVelocity::Profile::kNone) {
        const Vec3 u = kin.bodies[gb.body].rotation * gb.surface_velocity.velocity(t);
        cd.offset = Vec3(cd.t1.dot(u), cd.t2.dot(u), 0.0);
        cd.surface = gb.surface_velocity;
        cd.surface_rotation = kin.bodies[gb.body].rotation;
      }
      contacts.push_back(std::move(cd));
    }
  }
  return contacts;
}

}  // namespace csim
