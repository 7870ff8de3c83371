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

// Trajectory CSV, run report and digest helpers. Numbers are written with
// 17 significant digits so that identical runs give identical bytes.

#ifndef CONTACTSIM_OUTPUT_HPP_
#define CONTACTSIM_OUTPUT_HPP_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "contactsim/integrate.hpp"
#include "contactsim/model.hpp"

namespace csim {

std::string format_number(double x);

// Column names: t, one per position coordinate, one per velocity
// coordinate, e, dt.
std::vector<std::string> trajectory_columns(const Model& model);
void write_trajectory_csv(std::ostream& os, const Model& model, const Trajectory& traj);

// Structured run summary (JSON). Wall times are included.
std::string run_report_json(const Model& model, const IntegratorConfig& config,
                            const Trajectory& traj);

// 64-bit FNV-1a over the text form of a state, as 16 hex digits.
std::uint64_t fnv1a(const std::string& bytes, std::uint64_t hash = 0xcbf29ce484222325ULL);
std::string state_digest(const VecX& q, const VecX& v);

}  // namespace csim

#endif  // CONTACTSIM_OUTPUT_HPP_
