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

// Scenario description and the assembled, immutable Model.
//
// Coordinates: a free body contributes [x y z qw qx qy qz] to q and
// [vx vy vz wx wy wz] to v, with both linear and angular velocity expressed in
// the world frame. A jointed body contributes one coordinate to q and v.
// Fixed bodies contribute nothing.

#ifndef CONTACTSIM_MODEL_HPP_
#define CONTACTSIM_MODEL_HPP_

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "contactsim/types.hpp"

namespace csim {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Compliant point-contact parameters. Omitted stiction tolerance and
// transition width take the defaults below.
struct ContactMaterial {
  double stiffness = 1e4;            // k, N/m
  double dissipation = 0.0;          // d, s/m (Hunt & Crossley)
  double mu_static = 0.5;
  double mu_dynamic = 0.5;
  double stiction_tolerance = 1e-4;  // v_s, m/s
  double transition_width = 10.0;    // Delta, dimensionless
};

// Throws ValidationError naming the offending field. `context` prefixes the
// message, e.g. "materials[2]".
void validate_material(const ContactMaterial& m, const std::string& context = "material");

// Prescribed tangential velocity of a halfspace surface (conveyor belts).
struct SurfaceVelocity {
  enum class Profile { kNone, kConstant, kSine, kRampCosine };
  Profile profile = Profile::kNone;
  Vec3 amplitude = Vec3::Zero();  // m/s
  double frequency = 0.0;         // Hz

  // kConstant: A; kSine: A sin(wt); kRampCosine: A (1 - cos(wt)), w = 2 pi f.
  Vec3 velocity(double t) const;
  Vec3 acceleration(double t) const;
};

enum class Shape { kSphere, kHalfspace, kBox };

struct GeometrySpec {
  Shape shape = Shape::kSphere;
  double radius = 0.0;                 // sphere
  Vec3 half_extents = Vec3::Zero();    // box
  Vec3 normal = Vec3::UnitZ();         // halfspace, body frame
  double offset = 0.0;                 // halfspace: points x with n.x <= offset are inside
  Vec3 position = Vec3::Zero();        // sphere/box center in the body frame
  Quat orientation = Quat::Identity(); // box orientation in the body frame
  std::string material;                // name in ScenarioSpec::materials
  SurfaceVelocity surface_velocity;    // halfspace only
};

enum class BodyKind { kFixed, kFree, kJointed };

struct BodySpec {
  std::string name;
  BodyKind kind = BodyKind::kFree;
  double mass = 0.0;
  Vec3 inertia = Vec3::Zero();  // principal moments about the COM, body frame
  Vec3 com = Vec3::Zero();      // jointed bodies: COM in the body (joint) frame
  // Fixed and free bodies: initial pose (free body frame is its COM).
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();
  Vec3 velocity = Vec3::Zero();
  Vec3 angular_velocity = Vec3::Zero();
  std::vector<GeometrySpec> geometry;
};

enum class JointKind { kPrismatic, kRevolute };

struct JointSpec {
  std::string name;
  JointKind kind = JointKind::kRevolute;
  std::string parent = "world";
  std::string child;
  Vec3 origin = Vec3::Zero();  // joint location in the parent frame
  Vec3 axis = Vec3::UnitZ();   // unit axis in the parent frame
  std::optional<std::pair<double, double>> limits;
  bool actuated = false;
  double position = 0.0;  // initial coordinate
  double velocity = 0.0;
};

enum class Treatment { kImplicit, kExplicit };

// Built-in controllers acting on actuated joint coordinates, in joint order.
struct ControllerSpec {
  enum class Type { kNone, kPd, kOscillatingSetpoint, kConstantForce };
  Type type = Type::kNone;
  std::vector<double> kp, kd, ki;     // per actuated DOF
  std::vector<double> setpoint;       // q_d (center for the oscillating variant)
  std::vector<double> amplitude;      // oscillating setpoint amplitude
  double frequency = 0.0;             // Hz
  std::vector<double> force;          // constant force
  std::vector<double> effort_limit;   // empty or per actuated DOF; inf allowed
  Treatment treatment = Treatment::kImplicit;
};

enum class Scheme { kCenic1, kCenic2, kImplicitEuler, kRk3, kFixed };
enum class ErrorNormKind { kPosition, kFullState };
enum class LinesearchInit { kCubic, kFixed };

struct IntegratorConfig {
  Scheme scheme = Scheme::kCenic1;
  double accuracy = 1e-3;                  // epsilon_acc
  double max_step = 0.1;                   // dt_max, s
  std::optional<double> fixed_step;        // when set: every step accepted
  double k_init = 0.1;
  double k_safe = 0.9;
  double k_low = 0.9;
  double k_high = 1.2;
  double k_max_grow = 5.0;
  double kappa = 1e-3;                     // solver tolerance = max(kappa eps, 1e-8)
  ErrorNormKind error_norm = ErrorNormKind::kPosition;
  std::vector<double> position_weights;    // S; empty means all ones
  bool hessian_reuse = true;
  LinesearchInit linesearch_init = LinesearchInit::kCubic;
  int max_desired_iterations = 10;         // N in the reuse criterion
  double alpha_max = 1.5;
  double near_rigid_beta = 0.1;
  int max_nonfinite_retries = 20;
};

void validate_integrator(const IntegratorConfig& c);

struct NamedMaterial {
  std::string name;
  ContactMaterial material;
};

struct ScenarioSpec {
  std::string name = "scenario";
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);
  std::vector<NamedMaterial> materials;
  std::vector<BodySpec> bodies;
  std::vector<JointSpec> joints;
  ControllerSpec controller;
  IntegratorConfig integrator;
  double duration = 1.0;
  std::uint64_t seed = 0;
  double contact_margin = 1e-3;
  // Shape pairs skipped during pair enumeration, e.g. {"box", "box"}.
  std::vector<std::pair<std::string, std::string>> ignore_pairs;
};

// --- Assembled model ------------------------------------------------------

struct Body {
  std::string name;
  BodyKind kind;
  double mass;
  Vec3 inertia;
  Vec3 com;
  Vec3 fixed_position;       // fixed bodies
  Quat fixed_orientation;
  int q_start = -1;          // free: 7 coords; jointed: 1 coord
  int v_start = -1;
  int joint = -1;            // jointed bodies: index into Model::joints
};

struct Joint {
  std::string name;
  JointKind kind;
  int parent = -1;  // body index, -1 for world
  int child = -1;
  Vec3 origin;
  Vec3 axis;
  std::optional<std::pair<double, double>> limits;
  bool actuated = false;
  int q_index = -1;
  int v_index = -1;
  std::vector<int> ancestors;  // joint indices from the root down to this one
};

struct Geometry {
  int body = -1;
  Shape shape;
  double radius = 0.0;
  Vec3 half_extents = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();
  ContactMaterial material;
  SurfaceVelocity surface_velocity;
};

// Geometry pair in contact-convention order: the contact normal points from
// geometry b into geometry a. Halfspaces are always b; for sphere-box the
// sphere is a.
struct ContactPair {
  int geometry_a = -1;
  int geometry_b = -1;
};

struct Model {
  std::string name;
  int nq = 0;
  int nv = 0;
  Vec3 gravity;
  std::vector<Body> bodies;
  std::vector<Joint> joints;
  std::vector<int> joint_order;  // parents before children
  std::vector<Geometry> geometries;
  std::vector<ContactPair> pairs;
  std::vector<int> actuated_dofs;  // v indices, joint order
  VecX q0;
  VecX v0;
  VecX position_weights;  // S, length nq
  ControllerSpec controller;
  IntegratorConfig integrator;
  double duration = 1.0;
  std::uint64_t seed = 0;
  double contact_margin = 1e-3;

  int num_free_bodies() const;
  bool has_limits() const;
  int body_index(const std::string& name) const;  // -1 if absent
};

// Validates the scenario and builds index maps, pair lists and defaults.
// Throws ValidationError (bad values, names, quaternions) or
// ConfigurationError (unsupported shape pairs or joint topologies).
Model assemble_model(const ScenarioSpec& scenario);

// Stiffness harmonic mean; friction, dissipation, stiction tolerance and
// transition width take the minimum of the pair.
ContactMaterial combine_materials(const ContactMaterial& a, const ContactMaterial& b);

const char* scheme_name(Scheme s);
Scheme parse_scheme(const std::string& s);  // throws ValidationError
const char* shape_name(Shape s);

}  // namespace csim

#endif  // CONTACTSIM_MODEL_HPP_
