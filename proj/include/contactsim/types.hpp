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

#ifndef CONTACTSIM_TYPES_HPP_
#define CONTACTSIM_TYPES_HPP_

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace csim {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using Quat = Eigen::Quaterniond;

// Maps onto the CLI exit codes: validation/configuration problems exit with 2,
// everything else with 1.
enum class ErrorCategory { kValidation, kConfiguration, kRuntime };

class SimError : public std::runtime_error {
 public:
  SimError(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

// Malformed input: bad field values, duplicate names, broken invariants.
class ValidationError : public SimError {
 public:
  explicit ValidationError(const std::string& what)
      : SimError(ErrorCategory::kValidation, what) {}
};

// Well-formed input that requests an unsupported combination.
class ConfigurationError : public SimError {
 public:
  explicit ConfigurationError(const std::string& what)
      : SimError(ErrorCategory::kConfiguration, what) {}
};

class RuntimeFailure : public SimError {
 public:
  explicit RuntimeFailure(const std::string& what)
      : SimError(ErrorCategory::kRuntime, what) {}
};

inline const char* category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kValidation: return "validation";
    case ErrorCategory::kConfiguration: return "configuration";
    case ErrorCategory::kRuntime: return "runtime";
  }
  return "runtime";
}

}  // namespace csim

#endif  // CONTACTSIM_TYPES_HPP_
