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

// Controllers with internal state z:  z' = h(t, z, q, v),  tau = g(t, z, q, v).
// Each step they are reduced to a diagonal linear law tau ~ -C v + d with
// z_next = Z v_next + b, which keeps the velocity solve convex.

#ifndef CONTACTSIM_EXTERNAL_HPP_
#define CONTACTSIM_EXTERNAL_HPP_

#include <memory>
#include <vector>

#include "contactsim/model.hpp"
#include "contactsim/types.hpp"

namespace csim {

class ExternalSystem {
 public:
  virtual ~ExternalSystem() = default;

  virtual int state_size() const = 0;
  virtual VecX initial_state() const { return VecX::Zero(state_size()); }
  // Velocity indices receiving torque, in the order used by effort_limits().
  virtual const std::vector<int>& actuated_dofs() const = 0;
  virtual VecX effort_limits() const;  // default: unbounded

  virtual VecX h(double t, const VecX& z, const VecX& q, const VecX& v) const = 0;
  // Full length-nv torque; entries outside actuated_dofs() must be zero.
  virtual VecX g(double t, const VecX& z, const VecX& q, const VecX& v) const = 0;

  // Exact partial derivatives. Returning false selects forward differences.
  struct Partials {
    MatX h_z, h_q, h_v;  // nz x {nz, nq, nv}
    MatX g_z, g_q, g_v;  // nv x {nz, nq, nv}
  };
  virtual bool partials(double t, const VecX& z, const VecX& q, const VecX& v,
                        Partials* out) const {
    (void)t, (void)z, (void)q, (void)v, (void)out;
    return false;
  }

  Treatment treatment = Treatment::kImplicit;
};

// tau ~ -C v + d on `dofs`, z_next = Z v + b.
struct LinearizedCoupling {
  std::vector<int> dofs;
  VecX C;  // per entry of dofs, >= 0
  VecX d;
  VecX e;  // effort bounds, may be infinite
  MatX Z;  // nz x nv
  VecX b;
  bool explicit_fallback = false;  // implicit requested but (I - dt h_z) was singular
};

struct ExternalState {
  double t = 0.0;
  const VecX* q = nullptr;
  const VecX* v = nullptr;
  const VecX* z = nullptr;
};

// `kinematic_map` is N(q) at the start state; h and g are evaluated at t + dt.
LinearizedCoupling linearize(const ExternalSystem& ext, const ExternalState& x, double dt,
                             const MatX& kinematic_map);

VecX advance_external(const LinearizedCoupling& coupling, const VecX& v_next);

// Convex potential in one actuated velocity whose negative slope is
// dt * clamp(b - c v, -e, e).
struct EffortData {
  double c = 0.0;
  double b = 0.0;
  double e = kInfinity;
  double dt = 0.0;
};
struct EffortPotential {
  double value = 0.0;
  double gradient = 0.0;
  double hessian = 0.0;
};
EffortPotential effort_limit_potential(double v, const EffortData& data);

// Builtin controllers on the model's actuated joints; nullptr for kNone.
std::unique_ptr<ExternalSystem> make_controller(const Model& model);
std::unique_ptr<ExternalSystem> make_controller(const Model& model, const ControllerSpec& spec);

}  // namespace csim

#endif  // CONTACTSIM_EXTERNAL_HPP_
