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

// Convex time steps: the single implicit step and the two error-estimating
// schemes built from it (step doubling, trapezoid).

#ifndef CONTACTSIM_ICF_HPP_
#define CONTACTSIM_ICF_HPP_

#include <memory>
#include <vector>

#include "contactsim/dynamics.hpp"
#include "contactsim/external.hpp"
#include "contactsim/geometry.hpp"
#include "contactsim/solver.hpp"
#include "contactsim/stepper.hpp"

namespace csim {

// Dynamics and contact geometry at one state. Building one is the unit of
// "geometry query" accounting.
struct Snapshot {
  double t = 0.0;
  VecX q;
  VecX v;
  DynamicsTerms dynamics;
  std::vector<ContactData> contacts;
};

Snapshot take_snapshot(const Model& model, double t, const VecX& q, const VecX& v,
                       PhaseTimes* times = nullptr);

// Potential data for a contact over a step of size dt. Elastic force is
// -k phi, plus dt k v_n(backstep_v) when a backstep velocity is given. The
// lagged normal impulse and friction coefficient come from `lag_v`.
ContactPotentialData contact_potential_data(const ContactData& contact, const VecX& lag_v,
                                            double dt, const VecX* backstep_v = nullptr);

// Generalized force of the continuous contact laws at a snapshot.
VecX continuous_contact_force(const Snapshot& snap, int nv);

struct StepContext {
  const Model* model = nullptr;
  const ExternalSystem* external = nullptr;
  SolverOptions solver;
  HessianCache* cache = nullptr;
  double beta = 0.1;  // near-rigid limit parameter
  PhaseTimes* times = nullptr;
};

// Problem pieces for a first-order step from `snap`.
ConvexProblem first_order_problem(const StepContext& ctx, const Snapshot& snap, double dt,
                                  const LinearizedCoupling* coupling);
// Moving-surface offsets are evaluated at `offset_time`, the step end.
void add_contact_terms(ConvexProblem* problem, const std::vector<ContactData>& contacts,
                       const VecX& lag_v, double dt, double weight, const VecX* backstep_v,
                       double offset_time);
void add_limit_terms(ConvexProblem* problem, const Model& model, const VecX& q, const MatX& M,
                     double dt, double beta);
void add_effort_terms(ConvexProblem* problem, const LinearizedCoupling& coupling, double dt);

struct IcfStepResult {
  SimState next;
  VecX contact_impulse;  // generalized, J^T gamma
  SolverStats stats;
  int geometry_queries = 0;
};

// One first-order step from x, warm-started from x.v.
IcfStepResult icf_step(const StepContext& ctx, const SimState& x, double dt);

struct EstimatedStep {
  SimState next;   // propagated
  VecX q_low, v_low, z_low;
  VecX end_contact_force;  // trapezoid only: generalized contact force at the step end
  SolverStats stats;
  int geometry_queries = 0;
  int coupling_fallbacks = 0;
};

// Full step vs two half steps; propagates the two-half-step result.
EstimatedStep step_doubling(const StepContext& ctx, const SimState& x, double dt);

// First-order predictor plus trapezoid corrector. `prev_contact_force` is the
// generalized contact force carried from the previous step.
EstimatedStep trapezoid_step(const StepContext& ctx, const SimState& x, double dt,
                             const VecX& prev_contact_force);

enum class ConvexScheme { kSingle, kStepDoubling, kTrapezoid };

class ConvexStepper : public Stepper {
 public:
  ConvexStepper(const Model& model, const IntegratorConfig& config, const ExternalSystem* external,
                ConvexScheme scheme);
  int error_order() const override { return 2; }
  void start(const SimState& x0) override;
  AttemptResult attempt(const SimState& x, double dt, double solver_tolerance) override;
  void accept(const AttemptResult& result, double dt) override;

  const HessianCache& cache() const { return cache_; }

 private:
  const Model& model_;
  IntegratorConfig config_;
  const ExternalSystem* external_;
  ConvexScheme scheme_;
  HessianCache cache_;
  VecX prev_contact_force_;
  VecX pending_contact_force_;
};

}  // namespace csim

#endif  // CONTACTSIM_ICF_HPP_
