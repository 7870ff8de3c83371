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

#include "contactsim/contact.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace csim {

double sigmoid(double s) { return s / std::sqrt(s * s + 1.0); }

double friction_coefficient(double s, double mu_s, double mu_d, double delta) {
  const double blend = 0.5 * (1.0 - sigmoid(std::abs(s) - delta) / sigmoid(delta));
  return (mu_s - mu_d) * blend + mu_d;
}

double normal_force_continuous(double f_e, double v_n, double d) {
  return f_e * std::max(0.0, 1.0 - d * v_n);
}

Vec2 friction_force_continuous(const Vec2& v_t, double f_n, const ContactMaterial& m) {
  const double speed = v_t.norm();
  const double vs = m.stiction_tolerance;
  const double mu = friction_coefficient(speed / vs, m.mu_static, m.mu_dynamic, m.transition_width);
  return -mu * f_n * v_t / std::sqrt(speed * speed + vs * vs);
}

namespace {

// Upper end of the engaged range: both clamps are active for v_n < v_max.
double engaged_limit(const ContactPotentialData& c) {
  double v_max = c.elastic_force / (c.dt * c.stiffness);
  if (c.dissipation > 0.0) v_max = std::min(v_max, 1.0 / c.dissipation);
  return v_max;
}

// Antiderivative of the engaged impulse polynomial.
double impulse_integral(double v, const ContactPotentialData& c) {
  const double dtk = c.dt * c.stiffness;
  const double fe = c.elastic_force;
  const double d = c.dissipation;
  return c.dt * (fe * v - 0.5 * (fe * d + dtk) * v * v + dtk * d * v * v * v / 3.0);
}

}  // namespace

ScalarWithSlope normal_impulse(double v_n, const ContactPotentialData& c) {
  ScalarWithSlope out;
  if (v_n > engaged_limit(c)) return out;
  const double dtk = c.dt * c.stiffness;
  const double elastic = c.elastic_force - dtk * v_n;
  const double damping = 1.0 - c.dissipation * v_n;
  out.value = c.dt * std::max(0.0, elastic) * std::max(0.0, damping);
  out.slope = -c.dt * (dtk * damping + c.dissipation * elastic);
  return out;
}

Potential1 normal_potential(double v_n, const ContactPotentialData& c) {
  Potential1 out;
  const double v_max = engaged_limit(c);
  out.value = impulse_integral(std::min(0.0, v_max), c) - impulse_integral(std::min(v_n, v_max), c);
  const ScalarWithSlope g = normal_impulse(v_n, c);
  out.gradient = -g.value;
  out.hessian = -g.slope;
  return out;
}

Potential3 contact_potential(const Vec3& v_c, const ContactPotentialData& c) {
  Potential3 out;
  const Potential1 n = normal_potential(v_c.z(), c);
  out.value = n.value;
  out.gradient.z() = n.gradient;
  out.hessian(2, 2) = n.hessian;

  const double scale = c.mu_lagged * c.gamma_prev;
  if (scale > 0.0) {
    const Vec2 vt = v_c.head<2>();
    const double vs = c.stiction_tolerance;
    const double s = std::sqrt(vt.squaredNorm() + vs * vs);
    out.value += scale * s;
    out.gradient.head<2>() = scale * vt / s;
    out.hessian.topLeftCorner<2, 2>() =
        (scale / s) * (Eigen::Matrix2d::Identity() - vt * vt.transpose() / (s * s));
  }
  return out;
}

NearRigid near_rigid_parameters(double m_eff, double beta, double dt) {
  const double pi = std::numbers::pi;
  return {m_eff / (4.0 * pi * pi * beta * beta * dt * dt), beta * dt / pi};
}

Potential1 limit_potential(double rate, const LimitData& l) {
  Potential1 out;
  const NearRigid nr = near_rigid_parameters(l.m_eff, l.beta, l.dt);
  const double h = l.dt + nr.damping_time;
  const double w = l.dt * h * nr.stiffness;
  if (std::isfinite(l.lower)) {
    const double bias = (l.lower - l.position) / h;
    const double gap = bias - rate;
    if (gap >= 0.0) {
      out.value += 0.5 * w * gap * gap;
      out.gradient -= w * gap;
      out.hessian += w;
    }
  }
  if (std::isfinite(l.upper)) {
    const double bias = (l.upper - l.position) / h;
    const double gap = rate - bias;
    if (gap >= 0.0) {
      out.value += 0.5 * w * gap * gap;
      out.gradient += w * gap;
      out.hessian += w;
    }
  }
  return out;
}

double effective_mass(const MatX& G, const Eigen::LLT<MatX>& mass_factor) {
  const MatX W = G * mass_factor.solve(G.transpose());
  const double norm =
      G.rows() == 1 ? std::abs(W(0, 0)) : W.norm() / std::sqrt(static_cast<double>(G.rows()));
  return 1.0 / norm;
}

}  // namespace csim
