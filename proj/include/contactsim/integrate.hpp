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

// Error-controlled time advancement: error norms, the step-size controller
// and the advance loop shared by every scheme.

#ifndef CONTACTSIM_INTEGRATE_HPP_
#define CONTACTSIM_INTEGRATE_HPP_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "contactsim/external.hpp"
#include "contactsim/model.hpp"
#include "contactsim/stepper.hpp"

namespace csim {

// ||S (q - q_hat)||_inf; empty weights mean S = I.
double error_norm(const VecX& q, const VecX& q_hat, const VecX& weights);

// max(||S (q - q_hat)||_inf, ||v - v_hat||_inf).
double full_state_error_norm(const VecX& q, const VecX& q_hat, const VecX& v, const VecX& v_hat,
                             const VecX& weights);

// min(deadband(k_safe dt (eps/e)^(1/p)), k_max_grow dt, max_step). e = 0
// gives the growth cap.
double adjust_step_size(double dt, double e, double eps, int p, const IntegratorConfig& config);

// max(kappa eps, 1e-8) when error controlled, 1e-8 in fixed-step mode.
double solver_tolerance(const IntegratorConfig& config);

bool is_fixed_step(const IntegratorConfig& config);

// Throws ConfigurationError for baselines on models with joint limits.
std::unique_ptr<Stepper> make_stepper(const Model& model, const IntegratorConfig& config,
                                      const ExternalSystem* external);

struct StepRecord {
  double t = 0.0;  // attempt start
  double dt = 0.0;
  double error = 0.0;
  bool accepted = false;
  int iterations = 0;
  int factorizations = 0;
  int linesearch_iterations = 0;
  int geometry_queries = 0;
};

struct Sample {
  double t = 0.0;
  VecX q;
  VecX v;
  double error = 0.0;  // of the step that produced or brackets this sample
  double dt = 0.0;
};

struct RunTotals {
  long attempted = 0;
  long accepted = 0;
  long rejected = 0;
  long iterations = 0;
  long factorizations = 0;
  long linesearch_iterations = 0;
  long cost_evaluations = 0;
  long geometry_queries = 0;
  long nonfinite_retries = 0;
  long coupling_fallbacks = 0;
  double min_step = 0.0;
  double max_step = 0.0;
  double wall_time = 0.0;
  PhaseTimes phases;
};

enum class RunStatus { kOk, kBudgetExceeded, kTimeout };
const char* run_status_name(RunStatus s);

struct AdvanceOptions {
  std::optional<double> duration;     // default: model.duration
  std::optional<double> sample_rate;  // Hz; default: every accepted step
  long max_geometry_queries = 0;      // 0: unlimited
  long max_attempts = 0;              // 0: unlimited
  double wall_budget = 0.0;           // seconds; 0: unlimited
  bool record_steps = true;
  bool record_samples = true;
};

struct Trajectory {
  std::vector<Sample> samples;
  std::vector<StepRecord> records;
  RunTotals totals;
  RunStatus status = RunStatus::kOk;
  SimState final_state;
  double accepted_time = 0.0;  // sum of accepted step sizes
};

// Runs the model from its initial state with the given integrator settings.
// Throws RuntimeFailure on step-size underflow or repeated non-finite states.
Trajectory advance(const Model& model, const IntegratorConfig& config,
                   const AdvanceOptions& options = {});

// Linear interpolation with quaternion renormalization; s in [0, 1].
VecX interpolate_positions(const Model& model, const VecX& q0, const VecX& q1, double s);

}  // namespace csim

#endif  // CONTACTSIM_INTEGRATE_HPP_
