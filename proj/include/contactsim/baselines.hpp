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

// Conventional integrators applied to the contact model written as a smooth
// ODE: x = [q; v; z],  q' = N v,  M v' = -k + tau + J^T f(x),  z' = h.

#ifndef CONTACTSIM_BASELINES_HPP_
#define CONTACTSIM_BASELINES_HPP_

#include <optional>

#include "contactsim/external.hpp"
#include "contactsim/model.hpp"
#include "contactsim/stepper.hpp"

namespace csim {

VecX pack_state(const SimState& s);
SimState unpack_state(const Model& model, double t, const VecX& x);

// Throws ConfigurationError when the model has joint limits.
void require_smooth_model(const Model& model);

// Time derivative of the stacked state; one geometry query per call.
VecX smooth_ode_rhs(const Model& model, const ExternalSystem* external, double t, const VecX& x);

// Bogacki-Shampine 3(2) with first-same-as-last reuse; propagates the
// third-order solution.
class Rk3Stepper : public Stepper {
 public:
  Rk3Stepper(const Model& model, const ExternalSystem* external);
  int error_order() const override { return 3; }
  void start(const SimState& x0) override;
  AttemptResult attempt(const SimState& x, double dt, double solver_tolerance) override;
  void accept(const AttemptResult& result, double dt) override;

 private:
  VecX rhs(double t, const VecX& x);
  const Model& model_;
  const ExternalSystem* external_;
  std::optional<VecX> first_stage_;
  VecX pending_last_stage_;
  int queries_ = 0;
};

// Implicit Euler with step doubling. Newton iterations use a forward
// difference Jacobian that is kept until convergence degrades; divergence
// reports a failed attempt.
class ImplicitEulerStepper : public Stepper {
 public:
  ImplicitEulerStepper(const Model& model, const ExternalSystem* external);
  int error_order() const override { return 2; }
  AttemptResult attempt(const SimState& x, double dt, double solver_tolerance) override;

 private:
  std::optional<VecX> implicit_step(double t, const VecX& y0, double h, double tol,
                                    SolverStats* stats);
  VecX rhs(double t, const VecX& x);
  void refresh_jacobian(double t, const VecX& y);
  void refresh_factor(double h, SolverStats* stats);

  const Model& model_;
  const ExternalSystem* external_;
  MatX jacobian_;
  bool jacobian_valid_ = false;
  bool jacobian_fresh_ = false;
  Eigen::PartialPivLU<MatX> factor_;
  double factor_h_ = -1.0;
  int queries_ = 0;
};

}  // namespace csim

#endif  // CONTACTSIM_BASELINES_HPP_
