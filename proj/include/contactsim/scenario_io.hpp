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

// JSON scenario files. The schema is documented in README.md; every field
// except bodies[] is optional.

#ifndef CONTACTSIM_SCENARIO_IO_HPP_
#define CONTACTSIM_SCENARIO_IO_HPP_

#include <string>

#include "contactsim/model.hpp"

namespace csim {

// Throws ValidationError on malformed JSON, unknown enum strings or wrong
// field types. Range checks happen later in assemble_model.
ScenarioSpec parse_scenario(const std::string& json_text);
ScenarioSpec load_scenario_file(const std::string& path);

// Inverse of parse_scenario; parse_scenario(scenario_to_json(s)) == s.
std::string scenario_to_json(const ScenarioSpec& s);

}  // namespace csim

#endif  // CONTACTSIM_SCENARIO_IO_HPP_
