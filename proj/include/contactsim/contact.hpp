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

// Compliant contact: continuous force laws and the per-constraint convex
// potentials used by the time-stepping solver.

#ifndef CONTACTSIM_CONTACT_HPP_
#define CONTACTSIM_CONTACT_HPP_

#include "contactsim/model.hpp"
#include "contactsim/types.hpp"

namespace csim {

// s / sqrt(s^2 + 1).
double sigmoid(double s);

// Stribeck-like blend from mu_s at s = 0 to mu_d at s = 2 * delta. Evaluated
// as written; for s > 2 delta it dips slightly below mu_d.
double friction_coefficient(double s, double mu_s, double mu_d, double delta);

// f_e (1 - d v_n)_+.
double normal_force_continuous(double f_e, double v_n, double d);

// Regularized friction opposing the slip velocity v_t.
Vec2 friction_force_continuous(const Vec2& v_t, double f_n, const ContactMaterial& m);

// Per-contact data frozen at the start of a convex solve.
struct ContactPotentialData {
  double elastic_force = 0.0;   // f_e; may be negative for contacts inside the margin
  double stiffness = 0.0;       // k
  double dissipation = 0.0;     // d
  double gamma_prev = 0.0;      // lagged normal impulse
  double mu_lagged = 0.0;
  double stiction_tolerance = 1e-4;
  double dt = 0.0;
};

struct ScalarWithSlope {
  double value = 0.0;
  double slope = 0.0;
};

// gamma_n(v_n) = dt (f_e - dt k v_n)_+ (1 - d v_n)_+ and its derivative; at
// the clamp boundary the derivative from the engaged side is returned.
ScalarWithSlope normal_impulse(double v_n, const ContactPotentialData& data);

struct Potential1 {
  double value = 0.0;
  double gradient = 0.0;
  double hessian = 0.0;
};

struct Potential3 {
  double value = 0.0;
  Vec3 gradient = Vec3::Zero();
  Mat3 hessian = Mat3::Zero();
};

// Normal part of the contact potential: minus the integral of the impulse.
Potential1 normal_potential(double v_n, const ContactPotentialData& data);

// Full contact potential of a contact velocity (t1, t2, n); its gradient is
// minus the contact impulse.
Potential3 contact_potential(const Vec3& v_c, const ContactPotentialData& data);

// Near-rigid regularization for a constraint of effective mass m_eff.
struct NearRigid {
  double stiffness = 0.0;
  double damping_time = 0.0;  // tau
};
NearRigid near_rigid_parameters(double m_eff, double beta, double dt);

struct LimitData {
  double position = 0.0;  // c at the start of the step
  double lower = -kInfinity;
  double upper = kInfinity;
  double m_eff = 1.0;
  double beta = 0.1;
  double dt = 0.0;
};

// One-sided quadratics keeping the constraint rate within the band that
// returns the coordinate to [lower, upper]. Argument is the constraint rate.
Potential1 limit_potential(double rate, const LimitData& data);

// 1 / ||W|| with W = G M^-1 G^T. One row: |W|. Several rows:
// ||W||_F / sqrt(rows), the RMS of W's eigenvalues.
double effective_mass(const MatX& G, const Eigen::LLT<MatX>& mass_factor);

}  // namespace csim

#endif  // CONTACTSIM_CONTACT_HPP_
