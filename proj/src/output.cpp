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

#include "contactsim/output.hpp"

#include <cstdio>

#include "json.hpp"

namespace csim {

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::vector<std::string> trajectory_columns(const Model& model) {
  std::vector<std::string> q(model.nq), v(model.nv);
  static const char* kFreeQ[] = {"x", "y", "z", "qw", "qx", "qy", "qz"};
  static const char* kFreeV[] = {"vx", "vy", "vz", "wx", "wy", "wz"};
  for (const Body& b : model.bodies) {
    if (b.kind == BodyKind::kFree) {
      for (int i = 0; i < 7; ++i) q[b.q_start + i] = b.name + "." + kFreeQ[i];
      for (int i = 0; i < 6; ++i) v[b.v_start + i] = b.name + "." + kFreeV[i];
    }
  }
  for (const Joint& j : model.joints) {
    q[j.q_index] = j.name + ".q";
    v[j.v_index] = j.name + ".v";
  }
  std::vector<std::string> out{"t"};
  out.insert(out.end(), q.begin(), q.end());
  out.insert(out.end(), v.begin(), v.end());
  out.push_back("e");
  out.push_back("dt");
  return out;
}

void write_trajectory_csv(std::ostream& os, const Model& model, const Trajectory& traj) {
  const auto cols = trajectory_columns(model);
  for (size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const Sample& s : traj.samples) {
    os << format_number(s.t);
    for (int i = 0; i < s.q.size(); ++i) os << ',' << format_number(s.q[i]);
    for (int i = 0; i < s.v.size(); ++i) os << ',' << format_number(s.v[i]);
    os << ',' << format_number(s.error) << ',' << format_number(s.dt) << '\n';
  }
}

std::string run_report_json(const Model& model, const IntegratorConfig& config,
                            const Trajectory& traj) {
  const RunTotals& t = traj.totals;
  nlohmann::ordered_json j;
  j["scenario"] = model.name;
  j["scheme"] = scheme_name(config.scheme);
  j["accuracy"] = config.accuracy;
  if (config.fixed_step) j["fixed_step"] = *config.fixed_step;
  j["status"] = run_status_name(traj.status);
  j["simulated_time"] = traj.accepted_time;
  j["steps"] = {{"attempted", t.attempted}, {"accepted", t.accepted}, {"rejected", t.rejected},
                {"min_step", t.min_step},   {"max_step", t.max_step}};
  j["solver"] = {{"newton_iterations", t.iterations},
                 {"factorizations", t.factorizations},
                 {"linesearch_iterations", t.linesearch_iterations},
                 {"cost_evaluations", t.cost_evaluations}};
  j["geometry_queries"] = t.geometry_queries;
  j["nonfinite_retries"] = t.nonfinite_retries;
  j["coupling_fallbacks"] = t.coupling_fallbacks;
  j["wall_time"] = t.wall_time;
  j["phase_times"] = {{"geometry", t.phases.geometry},
                      {"dynamics", t.phases.dynamics},
                      {"assembly", t.phases.assembly},
                      {"factorization_and_solve", t.phases.factorization_and_solve},
                      {"external", t.phases.external}};
  j["final_state_digest"] = state_digest(traj.final_state.q, traj.final_state.v);
  return j.dump(2) + "\n";
}

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t hash) {
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string state_digest(const VecX& q, const VecX& v) {
  std::string text;
  for (int i = 0; i < q.size(); ++i) text += format_number(q[i]) + ",";
  for (int i = 0; i < v.size(); ++i) text += format_number(v[i]) + ",";
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(text)));
  return buf;
}

}  // namespace csim
