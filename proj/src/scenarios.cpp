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

#include "contactsim/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "contactsim/scenario_io.hpp"

namespace csim {
namespace {

constexpr double kPi = 3.14159265358979323846;

Vec3 sphere_inertia(double m, double r) { return Vec3::Constant(0.4 * m * r * r); }

Vec3 box_inertia(double m, const Vec3& h) {
  return Vec3(m * (h.y() * h.y() + h.z() * h.z()) / 3.0, m * (h.x() * h.x() + h.z() * h.z()) / 3.0,
              m * (h.x() * h.x() + h.y() * h.y()) / 3.0);
}

GeometrySpec sphere_geometry(double r, const std::string& material) {
  GeometrySpec g;
  g.shape = Shape::kSphere;
  g.radius = r;
  g.material = material;
  return g;
}

GeometrySpec box_geometry(const Vec3& half, const std::string& material) {
  GeometrySpec g;
  g.shape = Shape::kBox;
  g.half_extents = half;
  g.material = material;
  return g;
}

// Solid side is {x : n.x <= offset}.
GeometrySpec halfspace(const Vec3& n, double offset, const std::string& material) {
  GeometrySpec g;
  g.shape = Shape::kHalfspace;
  g.normal = n;
  g.offset = offset;
  g.material = material;
  return g;
}

BodySpec ground(const std::string& material) {
  BodySpec b;
  b.name = "ground";
  b.kind = BodyKind::kFixed;
  b.geometry.push_back(halfspace(Vec3::UnitZ(), 0.0, material));
  return b;
}

// Floor plus four walls at |x|, |y| = half_width.
BodySpec bin(double half_width, const std::string& material) {
  BodySpec b = ground(material);
  b.name = "bin";
  b.geometry.push_back(halfspace(Vec3(1, 0, 0), -half_width, material));
  b.geometry.push_back(halfspace(Vec3(-1, 0, 0), -half_width, material));
  b.geometry.push_back(halfspace(Vec3(0, 1, 0), -half_width, material));
  b.geometry.push_back(halfspace(Vec3(0, -1, 0), -half_width, material));
  return b;
}

BodySpec free_sphere(const std::string& name, double m, double r, const Vec3& p,
                     const std::string& material) {
  BodySpec b;
  b.name = name;
  b.kind = BodyKind::kFree;
  b.mass = m;
  b.inertia = sphere_inertia(m, r);
  b.position = p;
  b.geometry.push_back(sphere_geometry(r, material));
  return b;
}

ScenarioSpec ball_drop() {
  ScenarioSpec s;
  s.name = "ball_drop";
  ContactMaterial m;
  m.stiffness = 1e4;
  m.dissipation = 0.5;
  s.materials.push_back({"ground", m});
  s.bodies.push_back(ground("ground"));
  s.bodies.push_back(free_sphere("ball", 1.0, 0.1, Vec3(0, 0, 1.0), "ground"));
  s.duration = 1.5;
  return s;
}

ScenarioSpec soft_sphere_drop() {
  ScenarioSpec s;
  s.name = "soft_sphere_drop";
  ContactMaterial m;
  m.stiffness = 1e3;
  m.dissipation = 1.0;
  m.stiction_tolerance = 1e-2;
  s.materials.push_back({"soft", m});
  s.bodies.push_back(ground("soft"));
  BodySpec ball = free_sphere("ball", 1.0, 0.1, Vec3(0, 0, 0.5), "soft");
  ball.velocity = Vec3(0.1, 0.0, 0.0);
  s.bodies.push_back(ball);
  s.duration = 2.0;
  return s;
}

ScenarioSpec bouncing_ball_energy() {
  ScenarioSpec s;
  s.name = "bouncing_ball_energy";
  ContactMaterial m;
  m.stiffness = 1e3;
  m.dissipation = 0.0;
  m.mu_static = 0.0;
  m.mu_dynamic = 0.0;
  s.materials.push_back({"elastic", m});
  s.bodies.push_back(ground("elastic"));
  s.bodies.push_back(free_sphere("ball", 0.1, 0.05, Vec3(0, 0, 0.3), "elastic"));
  s.duration = 1.0;
  return s;
}

ScenarioSpec conveyor_belt() {
  ScenarioSpec s;
  s.name = "conveyor_belt";
  ContactMaterial m;
  m.stiffness = 1e4;
  m.dissipation = 1.0;
  m.mu_static = 1.0;
  m.mu_dynamic = 0.5;
  m.stiction_tolerance = 1e-4;
  s.materials.push_back({"belt", m});
  BodySpec belt = ground("belt");
  belt.name = "belt";
  // Belt speed 2 (1 - cos(2 pi t)) m/s: peak acceleration 4 pi m/s^2 exceeds
  // the static limit g, so the box sticks, breaks away and slips.
  belt.geometry[0].surface_velocity.profile = SurfaceVelocity::Profile::kRampCosine;
  belt.geometry[0].surface_velocity.amplitude = Vec3(2.0, 0.0, 0.0);
  belt.geometry[0].surface_velocity.frequency = 1.0;
  s.bodies.push_back(belt);

  BodySpec box;
  box.name = "box";
  box.kind = BodyKind::kFree;
  box.mass = 1.0;
  // Flat box: the friction torque about a bottom edge stays well below the
  // restoring gravity torque, so breakaway never tips it.
  const Vec3 half(0.1, 0.1, 0.02);
  box.inertia = box_inertia(1.0, half);
  // Resting at the static penetration of four corners: m g / (4 k).
  box.position = Vec3(0, 0, half.z() - 9.81 / (4.0 * m.stiffness));
  box.geometry.push_back(box_geometry(half, "belt"));
  s.bodies.push_back(box);
  s.duration = 1.0;
  return s;
}

// Random unit quaternion from three uniforms (Shoemake).
Quat random_rotation(std::uint64_t seed, std::uint64_t counter) {
  const double u1 = counter_uniform(seed, counter);
  const double u2 = counter_uniform(seed, counter + 1);
  const double u3 = counter_uniform(seed, counter + 2);
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  return Quat(a * std::sin(2 * kPi * u2), a * std::cos(2 * kPi * u2), b * std::sin(2 * kPi * u3),
              b * std::cos(2 * kPi * u3))
      .normalized();
}

struct Placement {
  Vec3 position;
  double bounding_radius;
};

// Rejection-samples a penetration-free position inside the bin using
// bounding spheres. Each candidate consumes a fixed block of counters.
Vec3 place(std::uint64_t seed, std::uint64_t* counter, double bound, double half_width,
           double z_max, std::vector<Placement>* placed) {
  constexpr double kGap = 0.005;
  for (int tries = 0; tries < 100000; ++tries) {
    const double lo = -half_width + bound + kGap, hi = half_width - bound - kGap;
    const Vec3 p(lo + (hi - lo) * counter_uniform(seed, *counter),
                 lo + (hi - lo) * counter_uniform(seed, *counter + 1),
                 bound + kGap + (z_max - bound - kGap) * counter_uniform(seed, *counter + 2));
    *counter += 3;
    const bool clear = std::all_of(placed->begin(), placed->end(), [&](const Placement& o) {
      return (o.position - p).norm() > o.bounding_radius + bound + kGap;
    });
    if (clear) {
      placed->push_back({p, bound});
      return p;
    }
  }
  throw ValidationError("clutter placement failed: bin too small for the requested objects");
}

ScenarioSpec soft_clutter(std::uint64_t seed) {
  ScenarioSpec s;
  s.name = "soft_clutter";
  s.seed = seed;
  ContactMaterial m;
  m.stiffness = 1e3;
  m.dissipation = 1.0;
  m.mu_static = 0.6;
  m.mu_dynamic = 0.5;
  m.stiction_tolerance = 1e-2;
  s.materials.push_back({"soft", m});
  const double half_width = 0.3;
  s.bodies.push_back(bin(half_width, "soft"));
  std::vector<Placement> placed;
  std::uint64_t counter = 0;
  for (int i = 0; i < 20; ++i) {
    const double r = 0.05;
    const Vec3 p = place(seed, &counter, r, half_width, 1.0, &placed);
    s.bodies.push_back(free_sphere("sphere" + std::to_string(i), 0.1, r, p, "soft"));
  }
  s.duration = 1.0;
  return s;
}

ScenarioSpec hard_clutter(std::uint64_t seed) {
  ScenarioSpec s;
  s.name = "hard_clutter";
  s.seed = seed;
  ContactMaterial m;
  m.stiffness = 1e5;
  m.dissipation = 5.0;
  m.mu_static = 0.6;
  m.mu_dynamic = 0.5;
  m.stiction_tolerance = 1e-4;
  s.materials.push_back({"hard", m});
  const double half_width = 0.3;
  s.bodies.push_back(bin(half_width, "hard"));
  std::vector<Placement> placed;
  std::uint64_t counter = 0;
  const double r = 0.04;
  const Vec3 half = Vec3::Constant(0.04);
  for (int i = 0; i < 20; ++i) {
    if (i % 2 == 0) {
      const Vec3 p = place(seed, &counter, r, half_width, 1.0, &placed);
      s.bodies.push_back(free_sphere("sphere" + std::to_string(i / 2), 0.1, r, p, "hard"));
    } else {
      const Vec3 p = place(seed, &counter, half.norm(), half_width, 1.0, &placed);
      BodySpec box;
      box.name = "box" + std::to_string(i / 2);
      box.kind = BodyKind::kFree;
      box.mass = 0.15;
      box.inertia = box_inertia(box.mass, half);
      box.position = p;
      box.orientation = random_rotation(seed, 1000000 + counter);
      counter += 3;
      box.geometry.push_back(box_geometry(half, "hard"));
      s.bodies.push_back(box);
    }
  }
  s.ignore_pairs.push_back({"box", "box"});
  s.duration = 1.0;
  return s;
}

// Two-link arm in the horizontal plane: gravity acts along the joint axes, so
// only the controller and inertial coupling drive the motion.
ScenarioSpec stiff_pd() {
  ScenarioSpec s;
  s.name = "stiff_pd";
  s.gravity = Vec3(0, 0, -9.81);
  for (int i = 0; i < 2; ++i) {
    BodySpec link;
    link.name = "link" + std::to_string(i + 1);
    link.kind = BodyKind::kJointed;
    link.mass = 1.0;
    link.com = Vec3(0.25, 0, 0);
    link.inertia = Vec3(1e-3, 1.0 / 48.0, 1.0 / 48.0);
    s.bodies.push_back(link);

    JointSpec j;
    j.name = "joint" + std::to_string(i + 1);
    j.kind = JointKind::kRevolute;
    j.parent = i == 0 ? "world" : "link1";
    j.child = link.name;
    j.origin = i == 0 ? Vec3::Zero() : Vec3(0.5, 0, 0);
    j.axis = Vec3::UnitZ();
    j.limits = std::make_pair(-3.0, 3.0);
    j.actuated = true;
    s.joints.push_back(j);
  }
  s.controller.type = ControllerSpec::Type::kPd;
  s.controller.kp = {1e2, 1e2};
  s.controller.kd = {20.0, 20.0};
  s.controller.setpoint = {1.0, -0.5};
  s.controller.treatment = Treatment::kImplicit;
  s.integrator.accuracy = 1e-2;
  s.duration = 1.0;
  return s;
}

// Single revolute pendulum, contact free.
ScenarioSpec pendulum() {
  ScenarioSpec s;
  s.name = "pendulum";
  BodySpec link;
  link.name = "bob";
  link.kind = BodyKind::kJointed;
  link.mass = 1.0;
  link.com = Vec3(0, 0, -0.5);
  link.inertia = Vec3(1e-3, 1e-3, 1e-3);
  s.bodies.push_back(link);
  JointSpec j;
  j.name = "hinge";
  j.kind = JointKind::kRevolute;
  j.child = "bob";
  j.axis = Vec3::UnitY();
  j.position = 1.0;
  s.joints.push_back(j);
  s.duration = 2.0;
  return s;
}

using Factory = std::function<ScenarioSpec(std::uint64_t)>;

const std::map<std::string, Factory>& registry() {
  static const std::map<std::string, Factory> r = {
      {"ball_drop", [](std::uint64_t) { return ball_drop(); }},
      {"bouncing_ball_energy", [](std::uint64_t) { return bouncing_ball_energy(); }},
      {"conveyor_belt", [](std::uint64_t) { return conveyor_belt(); }},
      {"hard_clutter", hard_clutter},
      {"pendulum", [](std::uint64_t) { return pendulum(); }},
      {"soft_clutter", soft_clutter},
      {"soft_sphere_drop", [](std::uint64_t) { return soft_sphere_drop(); }},
      {"stiff_pd", [](std::uint64_t) { return stiff_pd(); }},
  };
  return r;
}

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t counter) {
  // splitmix64 finalizer over a seed/counter mix.
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + counter * 0xD1B54A32D192ED03ULL + 1;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

std::vector<std::string> builtin_scenario_names() {
  std::vector<std::string> out;
  for (const auto& [name, f] : registry()) out.push_back(name);
  return out;
}

bool is_builtin_scenario(const std::string& name) { return registry().count(name) > 0; }

ScenarioSpec builtin_scenario(const std::string& name, std::optional<std::uint64_t> seed) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw ValidationError("unknown scenario: " + name);
  ScenarioSpec s = it->second(seed.value_or(0));
  s.seed = seed.value_or(0);
  return s;
}

ScenarioSpec resolve_scenario(const std::string& name_or_path,
                              std::optional<std::uint64_t> seed) {
  if (is_builtin_scenario(name_or_path)) return builtin_scenario(name_or_path, seed);
  ScenarioSpec s = load_scenario_file(name_or_path);
  if (seed) s.seed = *seed;
  return s;
}

}  // namespace csim
