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

#include "contactsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace csim {
namespace {

constexpr int kMaxChainDepth = 3;

bool finite(const Vec3& v) { return v.allFinite(); }

std::string field(const std::string& ctx, const std::string& name) {
  return ctx + "." + name;
}

[[noreturn]] void fail(const std::string& where, const std::string& why) {
  throw ValidationError(where + ": " + why);
}

}  // namespace

Vec3 SurfaceVelocity::velocity(double t) const {
  const double w = 2.0 * std::numbers::pi * frequency;
  switch (profile) {
    case Profile::kNone: return Vec3::Zero();
    case Profile::kConstant: return amplitude;
    case Profile::kSine: return amplitude * std::sin(w * t);
    case Profile::kRampCosine: return amplitude * (1.0 - std::cos(w * t));
  }
  return Vec3::Zero();
}

Vec3 SurfaceVelocity::acceleration(double t) const {
  const double w = 2.0 * std::numbers::pi * frequency;
  switch (profile) {
    case Profile::kNone:
    case Profile::kConstant: return Vec3::Zero();
    case Profile::kSine: return amplitude * w * std::cos(w * t);
    case Profile::kRampCosine: return amplitude * w * std::sin(w * t);
  }
  return Vec3::Zero();
}

void validate_material(const ContactMaterial& m, const std::string& ctx) {
  if (!(m.stiffness > 0.0) || !std::isfinite(m.stiffness))
    fail(field(ctx, "stiffness"), "must be positive and finite");
  if (!(m.dissipation >= 0.0) || !std::isfinite(m.dissipation))
    fail(field(ctx, "dissipation"), "must be non-negative and finite");
  if (!(m.mu_dynamic >= 0.0)) fail(field(ctx, "mu_dynamic"), "must be non-negative");
  if (!(m.mu_static >= m.mu_dynamic))
    fail(field(ctx, "mu_static"), "must be >= mu_dynamic");
  if (!(m.stiction_tolerance > 0.0))
    fail(field(ctx, "stiction_tolerance"), "must be positive");
  if (!(m.transition_width > 0.0))
    fail(field(ctx, "transition_width"), "must be positive");
}

void validate_integrator(const IntegratorConfig& c) {
  const std::string ctx = "integrator";
  if (!(c.accuracy > 0.0)) fail(field(ctx, "accuracy"), "must be positive");
  if (!(c.max_step > 0.0)) fail(field(ctx, "max_step"), "must be positive");
  if (c.fixed_step && !(*c.fixed_step > 0.0))
    fail(field(ctx, "fixed_step"), "must be positive");
  if (c.scheme == Scheme::kFixed && !c.fixed_step)
    fail(field(ctx, "fixed_step"), "required by the fixed scheme");
  if (!(c.k_low < 1.0 && 1.0 < c.k_high))
    fail(field(ctx, "k_low/k_high"), "require k_low < 1 < k_high");
  if (!(c.k_init > 0.0 && c.k_init <= 1.0)) fail(field(ctx, "k_init"), "must be in (0, 1]");
  if (!(c.k_safe > 0.0 && c.k_safe <= 1.0)) fail(field(ctx, "k_safe"), "must be in (0, 1]");
  if (!(c.k_max_grow >= 1.0)) fail(field(ctx, "k_max_grow"), "must be >= 1");
  if (!(c.kappa >= 0.0 && c.kappa <= 1.0)) fail(field(ctx, "kappa"), "must be in [0, 1]");
  if (!(c.alpha_max > 0.0)) fail(field(ctx, "alpha_max"), "must be positive");
  if (!(c.near_rigid_beta > 0.0)) fail(field(ctx, "near_rigid_beta"), "must be positive");
  if (c.max_desired_iterations < 1)
    fail(field(ctx, "max_desired_iterations"), "must be >= 1");
  for (double w : c.position_weights)
    if (!(w >= 0.0) || !std::isfinite(w))
      fail(field(ctx, "position_weights"), "entries must be finite and non-negative");
}

ContactMaterial combine_materials(const ContactMaterial& a, const ContactMaterial& b) {
  ContactMaterial m;
  m.stiffness = 2.0 * a.stiffness * b.stiffness / (a.stiffness + b.stiffness);
  m.dissipation = std::min(a.dissipation, b.dissipation);
  m.mu_static = std::min(a.mu_static, b.mu_static);
  m.mu_dynamic = std::min(a.mu_dynamic, b.mu_dynamic);
  m.stiction_tolerance = std::min(a.stiction_tolerance, b.stiction_tolerance);
  m.transition_width = std::min(a.transition_width, b.transition_width);
  return m;
}

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kCenic1: return "cenic1";
    case Scheme::kCenic2: return "cenic2";
    case Scheme::kImplicitEuler: return "ie";
    case Scheme::kRk3: return "rk3";
    case Scheme::kFixed: return "fixed";
  }
  return "?";
}

Scheme parse_scheme(const std::string& s) {
  if (s == "cenic1") return Scheme::kCenic1;
  if (s == "cenic2") return Scheme::kCenic2;
  if (s == "ie") return Scheme::kImplicitEuler;
  if (s == "rk3") return Scheme::kRk3;
  if (s == "fixed") return Scheme::kFixed;
  throw ValidationError("scheme: unknown value '" + s + "'");
}

const char* shape_name(Shape s) {
  switch (s) {
    case Shape::kSphere: return "sphere";
    case Shape::kHalfspace: return "halfspace";
    case Shape::kBox: return "box";
  }
  return "?";
}

int Model::num_free_bodies() const {
  return static_cast<int>(std::count_if(bodies.begin(), bodies.end(), [](const Body& b) {
    return b.kind == BodyKind::kFree;
  }));
}

bool Model::has_limits() const {
  return std::any_of(joints.begin(), joints.end(),
                     [](const Joint& j) { return j.limits.has_value(); });
}

int Model::body_index(const std::string& n) const {
  for (size_t i = 0; i < bodies.size(); ++i)
    if (bodies[i].name == n) return static_cast<int>(i);
  return -1;
}

namespace {

void validate_geometry(const GeometrySpec& g, const BodySpec& body, const std::string& ctx,
                       const std::map<std::string, ContactMaterial>& materials) {
  if (!materials.count(g.material))
    fail(field(ctx, "material"), "unknown material '" + g.material + "'");
  switch (g.shape) {
    case Shape::kSphere:
      if (!(g.radius > 0.0) || !std::isfinite(g.radius))
        fail(field(ctx, "radius"), "must be positive");
      break;
    case Shape::kBox:
      if (!(g.half_extents.minCoeff() > 0.0) || !finite(g.half_extents))
        fail(field(ctx, "half_extents"), "must be positive");
      if (std::abs(g.orientation.norm() - 1.0) > 1e-9)
        fail(field(ctx, "orientation"), "quaternion must have unit norm");
      break;
    case Shape::kHalfspace:
      if (std::abs(g.normal.norm() - 1.0) > 1e-9)
        fail(field(ctx, "normal"), "must have unit norm");
      if (body.kind != BodyKind::kFixed)
        throw ConfigurationError(ctx + ": halfspaces must belong to fixed bodies");
      break;
  }
  if (g.surface_velocity.profile != SurfaceVelocity::Profile::kNone &&
      g.shape != Shape::kHalfspace)
    fail(field(ctx, "surface_velocity"), "only halfspaces may carry a surface velocity");
  if (!finite(g.position)) fail(field(ctx, "position"), "must be finite");
}

bool supported_pair(Shape a, Shape b) {
  auto is = [&](Shape x, Shape y) { return (a == x && b == y) || (a == y && b == x); };
  return is(Shape::kSphere, Shape::kSphere) || is(Shape::kSphere, Shape::kHalfspace) ||
         is(Shape::kSphere, Shape::kBox) || is(Shape::kBox, Shape::kHalfspace);
}

// Order a pair so that the normal points from b into a.
ContactPair orient_pair(const std::vector<Geometry>& geoms, int i, int j) {
  const Shape si = geoms[i].shape;
  const Shape sj = geoms[j].shape;
  if (si == Shape::kHalfspace) return {j, i};
  if (sj == Shape::kHalfspace) return {i, j};
  if (si == Shape::kBox && sj == Shape::kSphere) return {j, i};
  return {i, j};
}

}  // namespace

Model assemble_model(const ScenarioSpec& s) {
  Model m;
  m.name = s.name;
  if (!finite(s.gravity)) fail("gravity", "must be finite");
  m.gravity = s.gravity;
  if (!(s.duration > 0.0) || !std::isfinite(s.duration)) fail("duration", "must be positive");
  m.duration = s.duration;
  m.seed = s.seed;
  if (!(s.contact_margin >= 0.0)) fail("contact_margin", "must be non-negative");
  m.contact_margin = s.contact_margin;
  validate_integrator(s.integrator);
  m.integrator = s.integrator;

  std::map<std::string, ContactMaterial> materials;
  materials[""] = ContactMaterial{};  // geometry without a material name
  for (size_t i = 0; i < s.materials.size(); ++i) {
    const auto& nm = s.materials[i];
    const std::string ctx = "materials[" + std::to_string(i) + "]";
    if (nm.name.empty()) fail(field(ctx, "name"), "must not be empty");
    if (materials.count(nm.name)) fail(field(ctx, "name"), "duplicate name '" + nm.name + "'");
    validate_material(nm.material, ctx);
    materials[nm.name] = nm.material;
  }

  // Bodies.
  std::set<std::string> names;
  for (size_t i = 0; i < s.bodies.size(); ++i) {
    const BodySpec& b = s.bodies[i];
    const std::string ctx = "bodies[" + std::to_string(i) + "]";
    if (b.name.empty() || b.name == "world") fail(field(ctx, "name"), "invalid body name");
    if (!names.insert(b.name).second) fail(field(ctx, "name"), "duplicate name '" + b.name + "'");
    if (b.kind != BodyKind::kFixed) {
      if (!(b.mass > 0.0) || !std::isfinite(b.mass)) fail(field(ctx, "mass"), "must be positive");
      if (!(b.inertia.minCoeff() > 0.0) || !finite(b.inertia))
        fail(field(ctx, "inertia"), "components must be positive");
    }
    if (b.kind != BodyKind::kJointed && std::abs(b.orientation.norm() - 1.0) > 1e-9)
      fail(field(ctx, "orientation"), "quaternion must have unit norm");
    if (!finite(b.position) || !finite(b.velocity) || !finite(b.angular_velocity) ||
        !finite(b.com))
      fail(ctx, "initial state must be finite");
    for (size_t g = 0; g < b.geometry.size(); ++g)
      validate_geometry(b.geometry[g], b, field(ctx, "geometry[" + std::to_string(g) + "]"),
                        materials);

    Body body;
    body.name = b.name;
    body.kind = b.kind;
    body.mass = b.mass;
    body.inertia = b.inertia;
    body.com = b.kind == BodyKind::kJointed ? b.com : Vec3::Zero();
    body.fixed_position = b.position;
    body.fixed_orientation = b.orientation.normalized();
    m.bodies.push_back(body);
  }

  // Joints.
  std::set<std::string> joint_names;
  std::vector<int> joint_of_body(m.bodies.size(), -1);
  for (size_t i = 0; i < s.joints.size(); ++i) {
    const JointSpec& js = s.joints[i];
    const std::string ctx = "joints[" + std::to_string(i) + "]";
    if (js.name.empty()) fail(field(ctx, "name"), "must not be empty");
    if (!joint_names.insert(js.name).second)
      fail(field(ctx, "name"), "duplicate name '" + js.name + "'");
    if (std::abs(js.axis.norm() - 1.0) > 1e-9) fail(field(ctx, "axis"), "must have unit norm");
    if (js.limits && !(js.limits->first <= js.limits->second))
      fail(field(ctx, "limits"), "lower bound exceeds upper bound");
    if (!std::isfinite(js.position) || !std::isfinite(js.velocity) || !finite(js.origin))
      fail(ctx, "initial state must be finite");
    Joint j;
    j.name = js.name;
    j.kind = js.kind;
    j.origin = js.origin;
    j.axis = js.axis;
    j.limits = js.limits;
    j.actuated = js.actuated;
    j.child = m.body_index(js.child);
    if (j.child < 0) fail(field(ctx, "child"), "unknown body '" + js.child + "'");
    if (m.bodies[j.child].kind != BodyKind::kJointed)
      fail(field(ctx, "child"), "body '" + js.child + "' is not of kind jointed");
    if (joint_of_body[j.child] >= 0)
      fail(field(ctx, "child"), "body '" + js.child + "' already has a joint");
    if (js.parent == "world") {
      j.parent = -1;
    } else {
      j.parent = m.body_index(js.parent);
      if (j.parent < 0) fail(field(ctx, "parent"), "unknown body '" + js.parent + "'");
      if (m.bodies[j.parent].kind != BodyKind::kJointed)
        throw ConfigurationError(ctx + ": joints may only attach to the world or jointed bodies");
    }
    joint_of_body[j.child] = static_cast<int>(i);
    m.joints.push_back(j);
  }
  for (size_t b = 0; b < m.bodies.size(); ++b) {
    if (m.bodies[b].kind == BodyKind::kJointed && joint_of_body[b] < 0)
      fail("bodies[" + std::to_string(b) + "]", "jointed body has no joint");
    m.bodies[b].joint = joint_of_body[b];
  }
  // Ancestors and depth; detects cycles.
  for (size_t ji = 0; ji < m.joints.size(); ++ji) {
    std::vector<int> chain;
    int cur = static_cast<int>(ji);
    while (cur >= 0) {
      if (static_cast<int>(chain.size()) > kMaxChainDepth)
        throw ConfigurationError("joints[" + std::to_string(ji) +
                                 "]: serial chains are limited to depth 3 (or form a cycle)");
      chain.push_back(cur);
      const int parent_body = m.joints[cur].parent;
      cur = parent_body < 0 ? -1 : m.bodies[parent_body].joint;
    }
    if (static_cast<int>(chain.size()) > kMaxChainDepth)
      throw ConfigurationError("joints[" + std::to_string(ji) +
                               "]: serial chains are limited to depth 3");
    std::reverse(chain.begin(), chain.end());
    m.joints[ji].ancestors = chain;
  }
  {
    std::vector<int> order(m.joints.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return m.joints[a].ancestors.size() < m.joints[b].ancestors.size();
    });
    m.joint_order = order;
  }

  // DOF layout, in body order.
  int nq = 0, nv = 0;
  for (auto& b : m.bodies) {
    if (b.kind == BodyKind::kFree) {
      b.q_start = nq;
      b.v_start = nv;
      nq += 7;
      nv += 6;
    } else if (b.kind == BodyKind::kJointed) {
      b.q_start = nq++;
      b.v_start = nv++;
      m.joints[b.joint].q_index = b.q_start;
      m.joints[b.joint].v_index = b.v_start;
    }
  }
  m.nq = nq;
  m.nv = nv;
  for (const auto& j : m.joints)
    if (j.actuated) m.actuated_dofs.push_back(j.v_index);

  m.q0 = VecX::Zero(nq);
  m.v0 = VecX::Zero(nv);
  for (size_t i = 0; i < m.bodies.size(); ++i) {
    const Body& b = m.bodies[i];
    const BodySpec& bs = s.bodies[i];
    if (b.kind == BodyKind::kFree) {
      m.q0.segment<3>(b.q_start) = bs.position;
      const Quat qn = bs.orientation;
      m.q0.segment<4>(b.q_start + 3) << qn.w(), qn.x(), qn.y(), qn.z();
      m.v0.segment<3>(b.v_start) = bs.velocity;
      m.v0.segment<3>(b.v_start + 3) = bs.angular_velocity;
    }
  }
  for (size_t ji = 0; ji < m.joints.size(); ++ji) {
    m.q0[m.joints[ji].q_index] = s.joints[ji].position;
    m.v0[m.joints[ji].v_index] = s.joints[ji].velocity;
  }

  if (m.integrator.position_weights.empty()) {
    m.position_weights = VecX::Ones(nq);
  } else {
    if (static_cast<int>(m.integrator.position_weights.size()) != nq)
      fail("integrator.position_weights", "length must equal n_q = " + std::to_string(nq));
    m.position_weights = Eigen::Map<const VecX>(m.integrator.position_weights.data(), nq);
  }

  // Geometry instances and pairs.
  for (size_t i = 0; i < m.bodies.size(); ++i) {
    for (const auto& gs : s.bodies[i].geometry) {
      Geometry g;
      g.body = static_cast<int>(i);
      g.shape = gs.shape;
      g.radius = gs.radius;
      g.half_extents = gs.half_extents;
      g.normal = gs.normal.normalized();
      g.offset = gs.offset;
      g.position = gs.position;
      g.orientation = gs.orientation.normalized();
      g.material = materials.at(gs.material);
      g.surface_velocity = gs.surface_velocity;
      m.geometries.push_back(g);
    }
  }
  auto ignored = [&](Shape a, Shape b) {
    for (const auto& [x, y] : s.ignore_pairs) {
      if ((x == shape_name(a) && y == shape_name(b)) || (x == shape_name(b) && y == shape_name(a)))
        return true;
    }
    return false;
  };
  const int ng = static_cast<int>(m.geometries.size());
  for (int i = 0; i < ng; ++i) {
    for (int j = i + 1; j < ng; ++j) {
      const Geometry& gi = m.geometries[i];
      const Geometry& gj = m.geometries[j];
      if (gi.body == gj.body) continue;
      if (m.bodies[gi.body].kind == BodyKind::kFixed && m.bodies[gj.body].kind == BodyKind::kFixed)
        continue;
      if (ignored(gi.shape, gj.shape)) continue;
      if (!supported_pair(gi.shape, gj.shape)) {
        throw ConfigurationError(std::string("unsupported contact pair ") + shape_name(gi.shape) +
                                 "-" + shape_name(gj.shape) + " between bodies '" +
                                 m.bodies[gi.body].name + "' and '" + m.bodies[gj.body].name +
                                 "' (add it to ignore_pairs to skip)");
      }
      m.pairs.push_back(orient_pair(m.geometries, i, j));
    }
  }

  // Controller dimensions.
  const ControllerSpec& c = s.controller;
  const size_t na = m.actuated_dofs.size();
  auto check_len = [&](const std::vector<double>& v, const char* name, bool required) {
    if (v.empty() && !required) return;
    if (v.size() != na)
      fail(std::string("controller.") + name,
           "length must equal the number of actuated joints (" + std::to_string(na) + ")");
  };
  switch (c.type) {
    case ControllerSpec::Type::kNone: break;
    case ControllerSpec::Type::kPd:
    case ControllerSpec::Type::kOscillatingSetpoint:
      check_len(c.kp, "kp", true);
      check_len(c.kd, "kd", true);
      check_len(c.ki, "ki", false);
      check_len(c.setpoint, "setpoint", false);
      if (c.type == ControllerSpec::Type::kOscillatingSetpoint) check_len(c.amplitude, "amplitude", true);
      break;
    case ControllerSpec::Type::kConstantForce:
      check_len(c.force, "force", true);
      break;
  }
  check_len(c.effort_limit, "effort_limit", false);
  for (double e : c.effort_limit)
    if (!(e >= 0.0)) fail("controller.effort_limit", "entries must be non-negative");
  if (c.type != ControllerSpec::Type::kNone && na == 0)
    throw ConfigurationError("controller: scenario has no actuated joints");
  m.controller = c;
  return m;
}

}  // namespace csim
