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

// Work-precision sweeps: every (scheme, accuracy) cell runs its own
// simulation; cells run concurrently and are reported in input order.

#ifndef CONTACTSIM_SWEEP_HPP_
#define CONTACTSIM_SWEEP_HPP_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "contactsim/integrate.hpp"
#include "contactsim/model.hpp"

namespace csim {

struct SweepOptions {
  ScenarioSpec scenario;
  std::vector<Scheme> schemes;
  std::vector<double> accuracies;
  std::optional<double> duration;
  double sample_rate = 100.0;    // Hz, grid for the error-vs-reference column
  int jobs = 1;
  double timeout_factor = 100.0;  // wall seconds per simulated second
  Scheme reference_scheme = Scheme::kCenic1;
  std::optional<double> reference_accuracy;  // default: tightest sweep accuracy
};

struct SweepRow {
  Scheme scheme = Scheme::kCenic1;
  double accuracy = 0.0;
  std::string status;  // ok, budget, timeout, validation_error, ...
  RunTotals totals;
  std::string digest;  // final state, empty when the cell failed
  std::optional<double> error_vs_reference;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::optional<double> reference_accuracy;
  std::string reference_status;
};

SweepResult run_sweep(const SweepOptions& options);

// Max over matched sample times and coordinates of the weighted position
// difference.
double trajectory_distance(const Trajectory& a, const Trajectory& b, const VecX& weights);

// Wall time is a column only when requested; it is the one
// non-reproducible quantity.
void write_sweep_csv(std::ostream& os, const std::string& scenario, const SweepResult& result,
                     bool with_timing);

}  // namespace csim

#endif  // CONTACTSIM_SWEEP_HPP_
