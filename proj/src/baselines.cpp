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

#include "contactsim/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "contactsim/dynamics.hpp"
#include "contactsim/icf.hpp"

namespace csim {
namespace {

constexpr int kMaxNewtonIterations = 10;

}  // namespace

VecX pack_state(const SimState& s) {
  VecX x(s.q.size() + s.v.size() + s.z.size());
  x << s.q, s.v, s.z;
  return x;
}

SimState unpack_state(const Model& model, double t, const VecX& x) {
  SimState s;
  s.t = t;
  s.q = x.head(model.nq);
  s.v = x.segment(model.nq, model.nv);
  s.z = x.tail(x.size() - model.nq - model.nv);
  return s;
}

void require_smooth_model(const Model& model) {
  if (model.has_limits())
    throw ConfigurationError(
        "baseline integrators (ie, rk3) support smooth ODE scenarios only; this scenario has "
        "joint limits");
}

VecX smooth_ode_rhs(const Model& model, const ExternalSystem* ext, double t, const VecX& x) {
  const SimState s = unpack_state(model, t, x);
  const Snapshot snap = take_snapshot(model, t, s.q, s.v);
  VecX force = -snap.dynamics.bias + continuous_contact_force(snap, model.nv);
  VecX zdot;
  if (ext) {
    force += ext->g(t, s.z, s.q, s.v);
    zdot = ext->h(t, s.z, s.q, s.v);
  }
  VecX out(x.size());
  out.head(model.nq) = snap.dynamics.N * s.v;
  out.segment(model.nq, model.nv) = snap.dynamics.M.llt().solve(force);
  out.tail(zdot.size()) = zdot;
  return out;
}

// --- Bogacki-Shampine ------------------------------------------------------

Rk3Stepper::Rk3Stepper(const Model& model, const ExternalSystem* external)
    : model_(model), external_(external) {
  require_smooth_model(model);
}

VecX Rk3Stepper::rhs(double t, const VecX& x) {
  ++queries_;
  return smooth_ode_rhs(model_, external_, t, x);
}

void Rk3Stepper::start(const SimState& x0) {
  (void)x0;
  first_stage_.reset();
}

AttemptResult Rk3Stepper::attempt(const SimState& x, double h, double solver_tolerance) {
  (void)solver_tolerance;
  queries_ = 0;
  const VecX y = pack_state(x);
  const VecX k1 = first_stage_ ? *first_stage_ : rhs(x.t, y);
  const VecX k2 = rhs(x.t + 0.5 * h, y + 0.5 * h * k1);
  const VecX k3 = rhs(x.t + 0.75 * h, y + 0.75 * h * k2);
  VecX y1 = y + h * (2.0 / 9.0 * k1 + 1.0 / 3.0 * k2 + 4.0 / 9.0 * k3);
  const VecX k4 = rhs(x.t + h, y1);
  const VecX y2 = y + h * (7.0 / 24.0 * k1 + 0.25 * k2 + 1.0 / 3.0 * k3 + 0.125 * k4);

  AttemptResult out;
  out.next = unpack_state(model_, x.t + h, y1);
  normalize_quaternions(model_, out.next.q);
  out.q_low = y2.head(model_.nq);
  out.v_low = y2.segment(model_.nq, model_.nv);
  out.geometry_queries = queries_;
  out.failed = !y1.allFinite();
  pending_last_stage_ = k4;
  return out;
}

void Rk3Stepper::accept(const AttemptResult& result, double dt) {
  (void)result, (void)dt;
  first_stage_ = pending_last_stage_;
}

// --- Implicit Euler -----------------------------------------------------------

ImplicitEulerStepper::ImplicitEulerStepper(const Model& model, const ExternalSystem* external)
    : model_(model), external_(external) {
  require_smooth_model(model);
}

VecX ImplicitEulerStepper::rhs(double t, const VecX& x) {
  ++queries_;
  return smooth_ode_rhs(model_, external_, t, x);
}

void ImplicitEulerStepper::refresh_jacobian(double t, const VecX& y) {
  const int n = static_cast<int>(y.size());
  jacobian_.resize(n, n);
  const VecX f0 = rhs(t, y);
  VecX yp = y;
  for (int j = 0; j < n; ++j) {
    const double step =
        std::sqrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(y[j]));
    yp[j] = y[j] + step;
    jacobian_.col(j) = (rhs(t, yp) - f0) / step;
    yp[j] = y[j];
  }
  jacobian_valid_ = true;
  jacobian_fresh_ = true;
  factor_h_ = -1.0;
}

void ImplicitEulerStepper::refresh_factor(double h, SolverStats* stats) {
  if (factor_h_ == h) return;
  const int n = static_cast<int>(jacobian_.rows());
  factor_.compute(MatX::Identity(n, n) - h * jacobian_);
  factor_h_ = h;
  ++stats->factorizations;
}

std::optional<VecX> ImplicitEulerStepper::implicit_step(double t, const VecX& y0, double h,
                                                        double tol, SolverStats* stats) {
  for (int pass = 0; pass < 2; ++pass) {
    if (!jacobian_valid_) refresh_jacobian(t, y0);
    refresh_factor(h, stats);
    VecX y = y0;
    double prev = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int it = 0; it < kMaxNewtonIterations; ++it) {
      const VecX residual = y - y0 - h * rhs(t + h, y);
      const VecX dy = -factor_.solve(residual);
      y += dy;
      ++stats->iterations;
      if (!y.allFinite()) break;
      double norm = 0.0;
      for (int i = 0; i < y.size(); ++i)
        norm = std::max(norm, std::abs(dy[i]) / std::max(1.0, std::abs(y[i])));
      if (norm <= tol) {
        converged = true;
        break;
      }
      if (it > 0 && norm > 0.9 * prev) break;  // too slow or diverging
      prev = norm;
    }
    if (converged) {
      jacobian_fresh_ = false;
      return y;
    }
    if (jacobian_fresh_) return std::nullopt;
    jacobian_valid_ = false;
  }
  return std::nullopt;
}

AttemptResult ImplicitEulerStepper::attempt(const SimState& x, double h, double solver_tolerance) {
  queries_ = 0;
  AttemptResult out;
  const VecX y0 = pack_state(x);
  const double tol = std::max(1e-3 * solver_tolerance, 1e-12);

  auto normalized = [&](VecX y) {
    VecX q = y.head(model_.nq);
    normalize_quaternions(model_, q);
    y.head(model_.nq) = q;
    return y;
  };
  const auto full = implicit_step(x.t, y0, h, tol, &out.stats);
  std::optional<VecX> half1, half2;
  if (full) half1 = implicit_step(x.t, y0, 0.5 * h, tol, &out.stats);
  if (half1) half2 = implicit_step(x.t + 0.5 * h, normalized(*half1), 0.5 * h, tol, &out.stats);
  out.geometry_queries = queries_;
  if (!half2) {
    out.failed = true;
    out.next = x;
    out.q_low = x.q;
    out.v_low = x.v;
    return out;
  }
  out.next = unpack_state(model_, x.t + h, normalized(*half2));
  out.q_low = full->head(model_.nq);
  out.v_low = full->segment(model_.nq, model_.nv);
  return out;
}

}  // namespace csim
