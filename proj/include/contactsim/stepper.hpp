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

#ifndef CONTACTSIM_STEPPER_HPP_
#define CONTACTSIM_STEPPER_HPP_

#include "contactsim/solver.hpp"
#include "contactsim/types.hpp"

namespace csim {

struct SimState {
  double t = 0.0;
  VecX q;
  VecX v;
  VecX z;  // controller state
};

// Wall-clock seconds per phase, accumulated over a run.
struct PhaseTimes {
  double geometry = 0.0;
  double dynamics = 0.0;
  double assembly = 0.0;
  double factorization_and_solve = 0.0;
  double external = 0.0;

  PhaseTimes& operator+=(const PhaseTimes& o) {
    geometry += o.geometry;
    dynamics += o.dynamics;
    assembly += o.assembly;
    factorization_and_solve += o.factorization_and_solve;
    external += o.external;
    return *this;
  }
};

struct AttemptResult {
  SimState next;  // propagated solution
  VecX q_low;     // lower-order companion used for the error estimate
  VecX v_low;
  SolverStats stats;
  int geometry_queries = 0;
  int coupling_fallbacks = 0;
  bool failed = false;  // e.g. Newton divergence in a baseline
};

// One error-estimating time step. Implementations own any data carried from
// one accepted step to the next.
class Stepper {
 public:
  virtual ~Stepper() = default;
  // Exponent p in dt_new = dt (eps / e)^(1/p).
  virtual int error_order() const = 0;
  virtual void start(const SimState& x0) { (void)x0; }
  virtual AttemptResult attempt(const SimState& x, double dt, double solver_tolerance) = 0;
  virtual void accept(const AttemptResult& result, double dt) { (void)result, (void)dt; }
  const PhaseTimes& times() const { return times_; }

 protected:
  PhaseTimes times_;
};

}  // namespace csim

#endif  // CONTACTSIM_STEPPER_HPP_
