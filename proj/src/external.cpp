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

#include "contactsim/external.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace csim {

VecX ExternalSystem::effort_limits() const {
  return VecX::Constant(static_cast<int>(actuated_dofs().size()), kInfinity);
}

namespace {

double fd_step(double x) {
  return std::sqrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(x));
}

// Reduced functions of (z, v) with q eliminated through q(v) = q0 + dt N v.
struct Reduced {
  const ExternalSystem& ext;
  double t;
  const VecX& q0;
  const MatX& N;
  double dt;

  VecX q_of(const VecX& v) const { return q0 + dt * (N * v); }
  VecX h(const VecX& z, const VecX& v) const { return ext.h(t, z, q_of(v), v); }
  VecX g(const VecX& z, const VecX& v) const { return ext.g(t, z, q_of(v), v); }
};

}  // namespace

LinearizedCoupling linearize(const ExternalSystem& ext, const ExternalState& x, double dt,
                             const MatX& N) {
  const VecX& q = *x.q;
  const VecX& v = *x.v;
  const VecX& z = *x.z;
  const int nz = ext.state_size();
  const int nv = static_cast<int>(v.size());
  const double t1 = x.t + dt;

  LinearizedCoupling out;
  out.dofs = ext.actuated_dofs();
  out.e = ext.effort_limits();
  const int na = static_cast<int>(out.dofs.size());

  auto explicit_coupling = [&](LinearizedCoupling c) {
    c.Z = MatX::Zero(nz, nv);
    c.b = nz > 0 ? VecX(z + dt * ext.h(x.t, z, q, v)) : VecX();
    const VecX tau = ext.g(x.t, z, q, v);
    c.C = VecX::Zero(na);
    c.d.resize(na);
    for (int i = 0; i < na; ++i) c.d[i] = tau[c.dofs[i]];
    return c;
  };
  if (ext.treatment == Treatment::kExplicit) return explicit_coupling(out);

  const Reduced red{ext, t1, q, N, dt};
  MatX hz(nz, nz), hv(nz, nv), gz(nv, nz), gv(nv, nv);
  VecX h0 = red.h(z, v);
  VecX g0 = red.g(z, v);
  ExternalSystem::Partials p;
  if (ext.partials(t1, z, red.q_of(v), v, &p)) {
    hz = p.h_z;
    hv = p.h_v + dt * p.h_q * N;
    gz = p.g_z;
    gv = p.g_v + dt * p.g_q * N;
  } else {
    VecX zp = z;
    for (int j = 0; j < nz; ++j) {
      const double step = fd_step(z[j]);
      zp[j] = z[j] + step;
      hz.col(j) = (red.h(zp, v) - h0) / step;
      gz.col(j) = (red.g(zp, v) - g0) / step;
      zp[j] = z[j];
    }
    VecX vp = v;
    for (int j = 0; j < nv; ++j) {
      const double step = fd_step(v[j]);
      vp[j] = v[j] + step;
      if (nz > 0) hv.col(j) = (red.h(z, vp) - h0) / step;
      gv.col(j) = (red.g(z, vp) - g0) / step;
      vp[j] = v[j];
    }
  }

  // Implicit Euler on the linearized state equation, solved for z(v).
  if (nz > 0) {
    const MatX lhs = MatX::Identity(nz, nz) - dt * hz;
    const Eigen::FullPivLU<MatX> lu(lhs);
    if (!lu.isInvertible() || lu.rcond() < 1e-14) {
      LinearizedCoupling c = explicit_coupling(out);
      c.explicit_fallback = true;
      return c;
    }
    const VecX bh = h0 - hz * z - hv * v;
    out.Z = lu.solve(dt * hv);
    out.b = lu.solve(z + dt * bh);
  } else {
    out.Z = MatX::Zero(0, nv);
    out.b = VecX();
  }

  // tau(v) = g(Z v + b, v): chain rule through z, diagonal kept.
  const MatX dtau_dv = gv + (nz > 0 ? MatX(gz * out.Z) : MatX::Zero(nv, nv));
  const VecX tau0 = nz > 0 ? red.g(out.Z * v + out.b, v) : g0;
  out.C.resize(na);
  out.d.resize(na);
  for (int i = 0; i < na; ++i) {
    const int k = out.dofs[i];
    out.C[i] = std::max(0.0, -dtau_dv(k, k));
    out.d[i] = tau0[k] + out.C[i] * v[k];
  }
  return out;
}

VecX advance_external(const LinearizedCoupling& c, const VecX& v_next) {
  if (c.b.size() == 0) return VecX();
  return c.Z * v_next + c.b;
}

EffortPotential effort_limit_potential(double v, const EffortData& x) {
  EffortPotential out;
  if (x.c <= 0.0) {
    const double f = std::clamp(x.b, -x.e, x.e);
    out.value = -x.dt * f * v;
    out.gradient = -x.dt * f;
    return out;
  }
  const double y = x.b - x.c * v;
  if (y > x.e) {
    out.value = x.dt * (-x.e * v + (2.0 * x.e * x.b - x.e * x.e) / (2.0 * x.c));
    out.gradient = -x.dt * x.e;
  } else if (y < -x.e) {
    out.value = x.dt * (x.e * v + (-2.0 * x.e * x.b - x.e * x.e) / (2.0 * x.c));
    out.gradient = x.dt * x.e;
  } else {
    out.value = x.dt * y * y / (2.0 * x.c);
    out.gradient = -x.dt * y;
    out.hessian = x.dt * x.c;
  }
  return out;
}

namespace {

double at(const std::vector<double>& v, size_t i, double fallback) {
  return i < v.size() ? v[i] : fallback;
}

// tau = -kp (q - q_d(t)) - kd (v - v_d(t)) - ki z, z' = q - q_d(t).
class PdController : public ExternalSystem {
 public:
  PdController(const Model& model, const ControllerSpec& spec) : spec_(spec) {
    dofs_ = model.actuated_dofs;
    for (int d : dofs_) {
      for (const Joint& j : model.joints)
        if (j.v_index == d) q_index_.push_back(j.q_index);
    }
    nv_ = model.nv;
    nq_ = model.nq;
    integral_ = !spec.ki.empty();
    treatment = spec.treatment;
  }

  int state_size() const override { return integral_ ? static_cast<int>(dofs_.size()) : 0; }
  const std::vector<int>& actuated_dofs() const override { return dofs_; }
  VecX effort_limits() const override {
    VecX e = VecX::Constant(static_cast<int>(dofs_.size()), kInfinity);
    for (size_t i = 0; i < spec_.effort_limit.size() && i < dofs_.size(); ++i)
      e[i] = spec_.effort_limit[i];
    return e;
  }

  void reference(double t, size_t i, double* qd, double* vd) const {
    const double center = at(spec_.setpoint, i, 0.0);
    if (spec_.type == ControllerSpec::Type::kOscillatingSetpoint) {
      const double w = 2.0 * std::numbers::pi * spec_.frequency;
      const double a = at(spec_.amplitude, i, 0.0);
      *qd = center + a * std::sin(w * t);
      *vd = a * w * std::cos(w * t);
    } else {
      *qd = center;
      *vd = 0.0;
    }
  }

  VecX h(double t, const VecX& z, const VecX& q, const VecX& v) const override {
    (void)z, (void)v;
    VecX out(state_size());
    for (int i = 0; i < state_size(); ++i) {
      double qd, vd;
      reference(t, i, &qd, &vd);
      out[i] = q[q_index_[i]] - qd;
    }
    return out;
  }

  VecX g(double t, const VecX& z, const VecX& q, const VecX& v) const override {
    VecX tau = VecX::Zero(nv_);
    for (size_t i = 0; i < dofs_.size(); ++i) {
      double qd, vd;
      reference(t, i, &qd, &vd);
      double f = -spec_.kp[i] * (q[q_index_[i]] - qd) - spec_.kd[i] * (v[dofs_[i]] - vd);
      if (integral_) f -= spec_.ki[i] * z[i];
      tau[dofs_[i]] = f;
    }
    return tau;
  }

  bool partials(double t, const VecX& z, const VecX& q, const VecX& v,
                Partials* p) const override {
    (void)t, (void)z, (void)q, (void)v;
    const int nz = state_size();
    p->h_z = MatX::Zero(nz, nz);
    p->h_q = MatX::Zero(nz, nq_);
    p->h_v = MatX::Zero(nz, nv_);
    p->g_z = MatX::Zero(nv_, nz);
    p->g_q = MatX::Zero(nv_, nq_);
    p->g_v = MatX::Zero(nv_, nv_);
    for (size_t i = 0; i < dofs_.size(); ++i) {
      if (integral_) {
        p->h_q(i, q_index_[i]) = 1.0;
        p->g_z(dofs_[i], i) = -spec_.ki[i];
      }
      p->g_q(dofs_[i], q_index_[i]) = -spec_.kp[i];
      p->g_v(dofs_[i], dofs_[i]) = -spec_.kd[i];
    }
    return true;
  }

 private:
  ControllerSpec spec_;
  std::vector<int> dofs_;
  std::vector<int> q_index_;
  int nv_ = 0;
  int nq_ = 0;
  bool integral_ = false;
};

class ConstantForce : public ExternalSystem {
 public:
  ConstantForce(const Model& model, const ControllerSpec& spec) : spec_(spec) {
    dofs_ = model.actuated_dofs;
    nv_ = model.nv;
    nq_ = model.nq;
    treatment = spec.treatment;
  }
  int state_size() const override { return 0; }
  const std::vector<int>& actuated_dofs() const override { return dofs_; }
  VecX effort_limits() const override {
    VecX e = VecX::Constant(static_cast<int>(dofs_.size()), kInfinity);
    for (size_t i = 0; i < spec_.effort_limit.size() && i < dofs_.size(); ++i)
      e[i] = spec_.effort_limit[i];
    return e;
  }
  VecX h(double, const VecX&, const VecX&, const VecX&) const override { return VecX(); }
  VecX g(double, const VecX&, const VecX&, const VecX&) const override {
    VecX tau = VecX::Zero(nv_);
    for (size_t i = 0; i < dofs_.size(); ++i) tau[dofs_[i]] = spec_.force[i];
    return tau;
  }
  bool partials(double, const VecX&, const VecX&, const VecX&, Partials* p) const override {
    p->h_z = MatX::Zero(0, 0);
    p->h_q = MatX::Zero(0, nq_);
    p->h_v = MatX::Zero(0, nv_);
    p->g_z = MatX::Zero(nv_, 0);
    p->g_q = MatX::Zero(nv_, nq_);
    p->g_v = MatX::Zero(nv_, nv_);
    return true;
  }

 private:
  ControllerSpec spec_;
  std::vector<int> dofs_;
  int nv_ = 0;
  int nq_ = 0;
};

}  // namespace

std::unique_ptr<ExternalSystem> make_controller(const Model& model) {
  return make_controller(model, model.controller);
}

std::unique_ptr<ExternalSystem> make_controller(const Model& model, const ControllerSpec& spec) {
  const size_t na = model.actuated_dofs.size();
  auto check = [&](const std::vector<double>& v, const char* name, bool required) {
    if ((required || !v.empty()) && v.size() != na)
      throw ValidationError(std::string("controller.") + name +
                            ": length must equal the number of actuated joints");
  };
  switch (spec.type) {
    case ControllerSpec::Type::kNone:
      return nullptr;
    case ControllerSpec::Type::kPd:
    case ControllerSpec::Type::kOscillatingSetpoint:
      check(spec.kp, "kp", true);
      check(spec.kd, "kd", true);
      check(spec.ki, "ki", false);
      check(spec.setpoint, "setpoint", false);
      return std::make_unique<PdController>(model, spec);
    case ControllerSpec::Type::kConstantForce:
      check(spec.force, "force", true);
      return std::make_unique<ConstantForce>(model, spec);
  }
  return nullptr;
}

}  // namespace csim
