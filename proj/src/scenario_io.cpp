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

#include "contactsim/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace csim {
namespace {

using nlohmann::json;

// Small cursor that remembers where in the document it is so error messages
// can name the offending field.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  bool has(const char* key) const { return j_.is_object() && j_.contains(key); }
  std::string where(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  Reader child(const char* key) const { return Reader(j_.at(key), where(key)); }
  Reader item(size_t i) const { return Reader(j_.at(i), path_ + "[" + std::to_string(i) + "]"); }
  size_t size() const { return j_.size(); }
  const json& raw() const { return j_; }
  const std::string& path() const { return path_; }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      const std::string s = v.get<std::string>();
      if (s == "inf" || s == "infinity") return kInfinity;
    }
    throw ValidationError(where(key) + ": expected a number");
  }
  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_boolean()) throw ValidationError(where(key) + ": expected a boolean");
    return j_.at(key).get<bool>();
  }
  std::string string(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_string()) throw ValidationError(where(key) + ": expected a string");
    return j_.at(key).get<std::string>();
  }
  Vec3 vec3(const char* key, const Vec3& fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_array() || v.size() != 3) throw ValidationError(where(key) + ": expected 3 numbers");
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
      if (!v[i].is_number()) throw ValidationError(where(key) + ": expected 3 numbers");
      out[i] = v[i].get<double>();
    }
    return out;
  }
  // [w, x, y, z]; normalization is checked by assemble_model.
  Quat quat(const char* key, const Quat& fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_array() || v.size() != 4)
      throw ValidationError(where(key) + ": expected a quaternion [w, x, y, z]");
    double c[4];
    for (int i = 0; i < 4; ++i) {
      if (!v[i].is_number()) throw ValidationError(where(key) + ": expected 4 numbers");
      c[i] = v[i].get<double>();
    }
    return Quat(c[0], c[1], c[2], c[3]);
  }
  std::vector<double> numbers(const char* key) const {
    std::vector<double> out;
    if (!has(key)) return out;
    const json& v = j_.at(key);
    if (!v.is_array()) throw ValidationError(where(key) + ": expected an array of numbers");
    for (size_t i = 0; i < v.size(); ++i) {
      if (v[i].is_number()) {
        out.push_back(v[i].get<double>());
      } else if (v[i].is_string() && (v[i] == "inf" || v[i] == "infinity")) {
        out.push_back(kInfinity);
      } else {
        throw ValidationError(where(key) + ": expected an array of numbers");
      }
    }
    return out;
  }

 private:
  const json& j_;
  std::string path_;
};

template <typename E, size_t N>
E parse_enum(const Reader& r, const char* key, E fallback,
             const std::pair<const char*, E> (&table)[N]) {
  if (!r.has(key)) return fallback;
  const std::string s = r.string(key, "");
  for (const auto& [name, value] : table)
    if (s == name) return value;
  throw ValidationError(r.where(key) + ": unknown value '" + s + "'");
}

constexpr std::pair<const char*, Shape> kShapes[] = {
    {"sphere", Shape::kSphere}, {"halfspace", Shape::kHalfspace}, {"box", Shape::kBox}};
constexpr std::pair<const char*, BodyKind> kBodyKinds[] = {
    {"fixed", BodyKind::kFixed}, {"free", BodyKind::kFree}, {"jointed", BodyKind::kJointed}};
constexpr std::pair<const char*, JointKind> kJointKinds[] = {
    {"prismatic", JointKind::kPrismatic}, {"revolute", JointKind::kRevolute}};
constexpr std::pair<const char*, SurfaceVelocity::Profile> kProfiles[] = {
    {"none", SurfaceVelocity::Profile::kNone},
    {"constant", SurfaceVelocity::Profile::kConstant},
    {"sine", SurfaceVelocity::Profile::kSine},
    {"one_minus_cos", SurfaceVelocity::Profile::kRampCosine}};
constexpr std::pair<const char*, ControllerSpec::Type> kControllers[] = {
    {"none", ControllerSpec::Type::kNone},
    {"pd", ControllerSpec::Type::kPd},
    {"oscillating_setpoint", ControllerSpec::Type::kOscillatingSetpoint},
    {"constant_force", ControllerSpec::Type::kConstantForce}};
constexpr std::pair<const char*, Treatment> kTreatments[] = {
    {"implicit", Treatment::kImplicit}, {"explicit", Treatment::kExplicit}};
constexpr std::pair<const char*, Scheme> kSchemes[] = {
    {"cenic1", Scheme::kCenic1}, {"cenic2", Scheme::kCenic2}, {"ie", Scheme::kImplicitEuler},
    {"rk3", Scheme::kRk3}, {"fixed", Scheme::kFixed}};
constexpr std::pair<const char*, ErrorNormKind> kNorms[] = {
    {"position", ErrorNormKind::kPosition}, {"full_state", ErrorNormKind::kFullState}};
constexpr std::pair<const char*, LinesearchInit> kInits[] = {
    {"cubic", LinesearchInit::kCubic}, {"fixed", LinesearchInit::kFixed}};

template <typename E, size_t N>
const char* enum_name(E value, const std::pair<const char*, E> (&table)[N]) {
  for (const auto& [name, v] : table)
    if (v == value) return name;
  return "?";
}

ContactMaterial read_material(const Reader& r) {
  ContactMaterial m;
  m.stiffness = r.number("stiffness", m.stiffness);
  m.dissipation = r.number("dissipation", m.dissipation);
  m.mu_static = r.number("mu_static", m.mu_static);
  m.mu_dynamic = r.number("mu_dynamic", m.mu_dynamic);
  m.stiction_tolerance = r.number("stiction_tolerance", m.stiction_tolerance);
  m.transition_width = r.number("transition_width", m.transition_width);
  return m;
}

GeometrySpec read_geometry(const Reader& r) {
  GeometrySpec g;
  if (!r.has("shape")) throw ValidationError(r.where("shape") + ": required");
  g.shape = parse_enum(r, "shape", Shape::kSphere, kShapes);
  g.radius = r.number("radius", 0.0);
  g.half_extents = r.vec3("half_extents", Vec3::Zero());
  g.normal = r.vec3("normal", Vec3::UnitZ());
  g.offset = r.number("offset", 0.0);
  g.position = r.vec3("position", Vec3::Zero());
  g.orientation = r.quat("orientation", Quat::Identity());
  g.material = r.string("material", "default");
  if (r.has("surface_velocity")) {
    Reader sv = r.child("surface_velocity");
    g.surface_velocity.profile =
        parse_enum(sv, "profile", SurfaceVelocity::Profile::kConstant, kProfiles);
    g.surface_velocity.amplitude = sv.vec3("amplitude", Vec3::Zero());
    g.surface_velocity.frequency = sv.number("frequency", 0.0);
  }
  return g;
}

BodySpec read_body(const Reader& r) {
  BodySpec b;
  b.name = r.string("name", "");
  b.kind = parse_enum(r, "kind", BodyKind::kFree, kBodyKinds);
  b.mass = r.number("mass", 0.0);
  b.inertia = r.vec3("inertia", Vec3::Zero());
  b.com = r.vec3("com", Vec3::Zero());
  b.position = r.vec3("position", Vec3::Zero());
  b.orientation = r.quat("orientation", Quat::Identity());
  b.velocity = r.vec3("velocity", Vec3::Zero());
  b.angular_velocity = r.vec3("angular_velocity", Vec3::Zero());
  if (r.has("geometry")) {
    Reader gs = r.child("geometry");
    for (size_t i = 0; i < gs.size(); ++i) b.geometry.push_back(read_geometry(gs.item(i)));
  }
  return b;
}

JointSpec read_joint(const Reader& r) {
  JointSpec j;
  j.name = r.string("name", "");
  j.kind = parse_enum(r, "kind", JointKind::kRevolute, kJointKinds);
  j.parent = r.string("parent", "world");
  j.child = r.string("child", "");
  j.origin = r.vec3("origin", Vec3::Zero());
  j.axis = r.vec3("axis", Vec3::UnitZ());
  if (r.has("limits")) {
    const auto lim = r.numbers("limits");
    if (lim.size() != 2) throw ValidationError(r.where("limits") + ": expected [lower, upper]");
    j.limits = std::make_pair(lim[0], lim[1]);
  }
  j.actuated = r.boolean("actuated", false);
  j.position = r.number("position", 0.0);
  j.velocity = r.number("velocity", 0.0);
  return j;
}

ControllerSpec read_controller(const Reader& r) {
  ControllerSpec c;
  c.type = parse_enum(r, "type", ControllerSpec::Type::kNone, kControllers);
  c.kp = r.numbers("kp");
  c.kd = r.numbers("kd");
  c.ki = r.numbers("ki");
  c.setpoint = r.numbers("setpoint");
  c.amplitude = r.numbers("amplitude");
  c.frequency = r.number("frequency", 0.0);
  c.force = r.numbers("force");
  c.effort_limit = r.numbers("effort_limit");
  c.treatment = parse_enum(r, "treatment", Treatment::kImplicit, kTreatments);
  return c;
}

IntegratorConfig read_integrator(const Reader& r) {
  IntegratorConfig c;
  c.scheme = parse_enum(r, "scheme", c.scheme, kSchemes);
  c.accuracy = r.number("accuracy", c.accuracy);
  c.max_step = r.number("max_step", c.max_step);
  if (r.has("fixed_step")) c.fixed_step = r.number("fixed_step", 0.0);
  c.k_init = r.number("k_init", c.k_init);
  c.k_safe = r.number("k_safe", c.k_safe);
  c.k_low = r.number("k_low", c.k_low);
  c.k_high = r.number("k_high", c.k_high);
  c.k_max_grow = r.number("k_max_grow", c.k_max_grow);
  c.kappa = r.number("kappa", c.kappa);
  c.error_norm = parse_enum(r, "error_norm", c.error_norm, kNorms);
  c.position_weights = r.numbers("position_weights");
  c.hessian_reuse = r.boolean("hessian_reuse", c.hessian_reuse);
  c.linesearch_init = parse_enum(r, "linesearch_init", c.linesearch_init, kInits);
  c.max_desired_iterations =
      static_cast<int>(r.number("max_desired_iterations", c.max_desired_iterations));
  c.alpha_max = r.number("alpha_max", c.alpha_max);
  c.near_rigid_beta = r.number("near_rigid_beta", c.near_rigid_beta);
  return c;
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
json quat_json(const Quat& q) { return json::array({q.w(), q.x(), q.y(), q.z()}); }
json numbers_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) {
    if (std::isinf(x)) a.push_back("inf");
    else a.push_back(x);
  }
  return a;
}

}  // namespace

ScenarioSpec parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("scenario: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("scenario: top level must be an object");
  const Reader r(doc, "");
  ScenarioSpec s;
  try {
    s.name = r.string("name", s.name);
    s.gravity = r.vec3("gravity", s.gravity);
    s.duration = r.number("duration", s.duration);
    if (r.has("seed")) {
      if (!doc["seed"].is_number_unsigned()) throw ValidationError("seed: expected an unsigned integer");
      s.seed = doc["seed"].get<std::uint64_t>();
    }
    s.contact_margin = r.number("contact_margin", s.contact_margin);
    if (r.has("materials")) {
      Reader ms = r.child("materials");
      for (size_t i = 0; i < ms.size(); ++i) {
        Reader mi = ms.item(i);
        s.materials.push_back({mi.string("name", ""), read_material(mi)});
      }
    }
    if (!r.has("bodies")) throw ValidationError("bodies: required");
    Reader bs = r.child("bodies");
    for (size_t i = 0; i < bs.size(); ++i) s.bodies.push_back(read_body(bs.item(i)));
    if (r.has("joints")) {
      Reader js = r.child("joints");
      for (size_t i = 0; i < js.size(); ++i) s.joints.push_back(read_joint(js.item(i)));
    }
    if (r.has("controller")) s.controller = read_controller(r.child("controller"));
    if (r.has("integrator")) s.integrator = read_integrator(r.child("integrator"));
    if (r.has("ignore_pairs")) {
      for (const auto& p : doc["ignore_pairs"]) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string())
          throw ValidationError("ignore_pairs: expected pairs of shape names");
        s.ignore_pairs.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scenario: ") + e.what());
  }
  return s;
}

ScenarioSpec load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("scenario: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string scenario_to_json(const ScenarioSpec& s) {
  json doc;
  doc["name"] = s.name;
  doc["gravity"] = vec_json(s.gravity);
  doc["duration"] = s.duration;
  doc["seed"] = s.seed;
  doc["contact_margin"] = s.contact_margin;
  json mats = json::array();
  for (const auto& nm : s.materials) {
    const auto& m = nm.material;
    mats.push_back({{"name", nm.name},
                    {"stiffness", m.stiffness},
                    {"dissipation", m.dissipation},
                    {"mu_static", m.mu_static},
                    {"mu_dynamic", m.mu_dynamic},
                    {"stiction_tolerance", m.stiction_tolerance},
                    {"transition_width", m.transition_width}});
  }
  doc["materials"] = mats;
  json bodies = json::array();
  for (const auto& b : s.bodies) {
    json jb = {{"name", b.name},
               {"kind", enum_name(b.kind, kBodyKinds)},
               {"mass", b.mass},
               {"inertia", vec_json(b.inertia)},
               {"com", vec_json(b.com)},
               {"position", vec_json(b.position)},
               {"orientation", quat_json(b.orientation)},
               {"velocity", vec_json(b.velocity)},
               {"angular_velocity", vec_json(b.angular_velocity)}};
    json geoms = json::array();
    for (const auto& g : b.geometry) {
      json jg = {{"shape", enum_name(g.shape, kShapes)},
                 {"material", g.material},
                 {"position", vec_json(g.position)}};
      switch (g.shape) {
        case Shape::kSphere: jg["radius"] = g.radius; break;
        case Shape::kBox:
          jg["half_extents"] = vec_json(g.half_extents);
          jg["orientation"] = quat_json(g.orientation);
          break;
        case Shape::kHalfspace:
          jg["normal"] = vec_json(g.normal);
          jg["offset"] = g.offset;
          break;
      }
      if (g.surface_velocity.profile != SurfaceVelocity::Profile::kNone) {
        jg["surface_velocity"] = {{"profile", enum_name(g.surface_velocity.profile, kProfiles)},
                                  {"amplitude", vec_json(g.surface_velocity.amplitude)},
                                  {"frequency", g.surface_velocity.frequency}};
      }
      geoms.push_back(jg);
    }
    jb["geometry"] = geoms;
    bodies.push_back(jb);
  }
  doc["bodies"] = bodies;
  json joints = json::array();
  for (const auto& j : s.joints) {
    json jj = {{"name", j.name},
               {"kind", enum_name(j.kind, kJointKinds)},
               {"parent", j.parent},
               {"child", j.child},
               {"origin", vec_json(j.origin)},
               {"axis", vec_json(j.axis)},
               {"actuated", j.actuated},
               {"position", j.position},
               {"velocity", j.velocity}};
    if (j.limits) jj["limits"] = numbers_json({j.limits->first, j.limits->second});
    joints.push_back(jj);
  }
  doc["joints"] = joints;
  const auto& c = s.controller;
  doc["controller"] = {{"type", enum_name(c.type, kControllers)},
                       {"kp", numbers_json(c.kp)},
                       {"kd", numbers_json(c.kd)},
                       {"ki", numbers_json(c.ki)},
                       {"setpoint", numbers_json(c.setpoint)},
                       {"amplitude", numbers_json(c.amplitude)},
                       {"frequency", c.frequency},
                       {"force", numbers_json(c.force)},
                       {"effort_limit", numbers_json(c.effort_limit)},
                       {"treatment", enum_name(c.treatment, kTreatments)}};
  const auto& ic = s.integrator;
  json ji = {{"scheme", enum_name(ic.scheme, kSchemes)},
             {"accuracy", ic.accuracy},
             {"max_step", ic.max_step},
             {"k_init", ic.k_init},
             {"k_safe", ic.k_safe},
             {"k_low", ic.k_low},
             {"k_high", ic.k_high},
             {"k_max_grow", ic.k_max_grow},
             {"kappa", ic.kappa},
             {"error_norm", enum_name(ic.error_norm, kNorms)},
             {"position_weights", numbers_json(ic.position_weights)},
             {"hessian_reuse", ic.hessian_reuse},
             {"linesearch_init", enum_name(ic.linesearch_init, kInits)},
             {"max_desired_iterations", ic.max_desired_iterations},
             {"alpha_max", ic.alpha_max},
             {"near_rigid_beta", ic.near_rigid_beta}};
  if (ic.fixed_step) ji["fixed_step"] = *ic.fixed_step;
  doc["integrator"] = ji;
  json ign = json::array();
  for (const auto& [a, b] : s.ignore_pairs) ign.push_back(json::array({a, b}));
  doc["ignore_pairs"] = ign;
  return doc.dump(2) + "\n";
}

}  // namespace csim
