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

// Built-in scenario registry.

#ifndef CONTACTSIM_SCENARIOS_HPP_
#define CONTACTSIM_SCENARIOS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "contactsim/model.hpp"

namespace csim {

std::vector<std::string> builtin_scenario_names();
bool is_builtin_scenario(const std::string& name);

// Throws ValidationError for unknown names. Clutter scenes draw their initial
// poses from `seed` (default: the scenario's own seed).
ScenarioSpec builtin_scenario(const std::string& name,
                              std::optional<std::uint64_t> seed = std::nullopt);

// Builtin name or path to a JSON scenario file.
ScenarioSpec resolve_scenario(const std::string& name_or_path,
                              std::optional<std::uint64_t> seed = std::nullopt);

// Counter-based generator: uniform double in [0, 1) from (seed, counter).
double counter_uniform(std::uint64_t seed, std::uint64_t counter);

}  // namespace csim

#endif  // CONTACTSIM_SCENARIOS_HPP_
