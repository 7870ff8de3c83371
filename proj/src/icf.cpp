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

#include "contactsim/icf.hpp"

#include <chrono>
#include <optional>

namespace csim {
namespace {

class ScopedTimer {
 public:
  explicit ScopedTimer(double* sink) : sink_(sink), start_(std::chrono::steady_clock::now()) {}
  ~ScopedTimer() {
    if (sink_)
      *sink_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  double* sink_;
  std::chrono::steady_clock::time_point start_;
};

double* slot(PhaseTimes* t, double PhaseTimes::*member) { return t ? &(t->*member) : nullptr; }

struct SolvedStep {
  VecX v;
  VecX q;
  VecX z;
  SolverStats stats;
};

std::optional<LinearizedCoupling> couple(const StepContext& ctx, double t, const VecX& q,
                                         const VecX& v, const VecX& z, double dt, const MatX& N) {
  if (!ctx.external) return std::nullopt;
  ScopedTimer timer(slot(ctx.times, &PhaseTimes::external));
  return linearize(*ctx.external, ExternalState{t, &q, &v, &z}, dt, N);
}

SolveResult run_solver(const StepContext& ctx, const ConvexProblem& problem, const VecX& warm) {
  ScopedTimer timer(slot(ctx.times, &PhaseTimes::factorization_and_solve));
  return solve(problem, warm, ctx.solver, *ctx.cache);
}

VecX next_external(const std::optional<LinearizedCoupling>& c, const VecX& z, const VecX& v) {
  if (!c) return z;
  return advance_external(*c, v);
}

// First-order step from a snapshot with its own coupling.
SolvedStep first_order_from(const StepContext& ctx, const Snapshot& snap, const VecX& z, double dt,
                            const VecX& warm, int* fallbacks) {
  const auto coupling = couple(ctx, snap.t, snap.q, snap.v, z, dt, snap.dynamics.N);
  if (coupling && coupling->explicit_fallback && fallbacks) ++*fallbacks;
  ConvexProblem problem = first_order_problem(ctx, snap, dt, coupling ? &*coupling : nullptr);
  SolveResult res = run_solver(ctx, problem, warm);
  SolvedStep out;
  out.q = advance_positions(*ctx.model, snap.q, res.v, dt);
  out.z = next_external(coupling, z, res.v);
  out.v = std::move(res.v);
  out.stats = res.stats;
  return out;
}

VecX contact_generalized_impulse(const ConvexProblem& problem, const VecX& v) {
  VecX out = VecX::Zero(problem.size());
  for (const auto& t : problem.terms) {
    if (t.kind != ConstraintTerm::Kind::kContact) continue;
    const Potential3 p = contact_potential(term_velocity(t, v), t.contact);
    const VecX local = -(t.jacobian.transpose() * p.gradient);
    for (size_t i = 0; i < t.dofs.size(); ++i) out[t.dofs[i]] += local[i];
  }
  return out;
}

}  // namespace

Snapshot take_snapshot(const Model& model, double t, const VecX& q, const VecX& v,
                       PhaseTimes* times) {
  Snapshot s;
  s.t = t;
  s.q = q;
  s.v = v;
  {
    ScopedTimer timer(slot(times, &PhaseTimes::dynamics));
    s.dynamics = dynamics_terms(model, q, v);
  }
  {
    ScopedTimer timer(slot(times, &PhaseTimes::geometry));
    s.contacts = query_contacts(model, q, t);
  }
  return s;
}

ContactPotentialData contact_potential_data(const ContactData& c, const VecX& lag_v, double dt,
                                            const VecX* backstep_v) {
  const ContactMaterial& m = c.material;
  ContactPotentialData d;
  d.stiffness = m.stiffness;
  d.dissipation = m.dissipation;
  d.stiction_tolerance = m.stiction_tolerance;
  d.dt = dt;
  d.elastic_force = -m.stiffness * c.phi;
  if (backstep_v) d.elastic_force += dt * m.stiffness * c.velocity(*backstep_v).z();
  const Vec3 vc = c.velocity(lag_v);
  const double fn = normal_force_continuous(m.stiffness * std::max(0.0, -c.phi), vc.z(),
                                            m.dissipation);
  d.gamma_prev = dt * fn;
  d.mu_lagged = friction_coefficient(vc.head<2>().norm() / m.stiction_tolerance, m.mu_static,
                                     m.mu_dynamic, m.transition_width);
  return d;
}

VecX continuous_contact_force(const Snapshot& snap, int nv) {
  VecX out = VecX::Zero(nv);
  for (const ContactData& c : snap.contacts) {
    const ContactMaterial& m = c.material;
    const Vec3 vc = c.velocity(snap.v);
    const double fn =
        normal_force_continuous(m.stiffness * std::max(0.0, -c.phi), vc.z(), m.dissipation);
    const Vec2 ft = friction_force_continuous(vc.head<2>(), fn, m);
    const VecX local = c.jacobian.transpose() * Vec3(ft.x(), ft.y(), fn);
    for (size_t i = 0; i < c.dofs.size(); ++i) out[c.dofs[i]] += local[i];
  }
  return out;
}

void add_contact_terms(ConvexProblem* problem, const std::vector<ContactData>& contacts,
                       const VecX& lag_v, double dt, double weight, const VecX* backstep_v,
                       double offset_time) {
  for (const ContactData& c : contacts) {
    ConstraintTerm t;
    t.kind = ConstraintTerm::Kind::kContact;
    t.dofs = c.dofs;
    t.jacobian = c.jacobian;
    t.offset = c.offset_at(offset_time);
    t.weight = weight;
    t.contact = contact_potential_data(c, lag_v, dt, backstep_v);
    problem->terms.push_back(std::move(t));
  }
}

void add_limit_terms(ConvexProblem* problem, const Model& model, const VecX& q, const MatX& M,
                     double dt, double beta) {
  if (!model.has_limits()) return;
  const Eigen::LLT<MatX> factor(M);
  for (const Joint& j : model.joints) {
    if (!j.limits) continue;
    MatX G = MatX::Zero(1, model.nv);
    G(0, j.v_index) = 1.0;
    ConstraintTerm t;
    t.kind = ConstraintTerm::Kind::kLimit;
    t.dofs = {j.v_index};
    t.jacobian = MatX::Ones(1, 1);
    t.offset = VecX::Zero(1);
    t.limit.position = q[j.q_index];
    t.limit.lower = j.limits->first;
    t.limit.upper = j.limits->second;
    t.limit.m_eff = effective_mass(G, factor);
    t.limit.beta = beta;
    t.limit.dt = dt;
    problem->terms.push_back(std::move(t));
  }
}

void add_effort_terms(ConvexProblem* problem, const LinearizedCoupling& c, double dt) {
  for (size_t i = 0; i < c.dofs.size(); ++i) {
    ConstraintTerm t;
    t.kind = ConstraintTerm::Kind::kEffort;
    t.dofs = {c.dofs[i]};
    t.jacobian = MatX::Ones(1, 1);
    t.offset = VecX::Zero(1);
    t.effort = EffortData{c.C[i], c.d[i], c.e[i], dt};
    problem->terms.push_back(std::move(t));
  }
}

ConvexProblem first_order_problem(const StepContext& ctx, const Snapshot& snap, double dt,
                                  const LinearizedCoupling* coupling) {
  ScopedTimer timer(slot(ctx.times, &PhaseTimes::assembly));
  ConvexProblem p;
  p.A = snap.dynamics.M;
  p.r = snap.dynamics.M * snap.v - dt * snap.dynamics.bias;
  add_contact_terms(&p, snap.contacts, snap.v, dt, 1.0, nullptr, snap.t + dt);
  add_limit_terms(&p, *ctx.model, snap.q, snap.dynamics.M, dt, ctx.beta);
  if (coupling) add_effort_terms(&p, *coupling, dt);
  return p;
}

IcfStepResult icf_step(const StepContext& ctx, const SimState& x, double dt) {
  const Snapshot snap = take_snapshot(*ctx.model, x.t, x.q, x.v, ctx.times);
  const auto coupling = couple(ctx, x.t, x.q, x.v, x.z, dt, snap.dynamics.N);
  const ConvexProblem problem = first_order_problem(ctx, snap, dt, coupling ? &*coupling : nullptr);
  SolveResult res = run_solver(ctx, problem, x.v);
  IcfStepResult out;
  out.next.t = x.t + dt;
  out.next.q = advance_positions(*ctx.model, x.q, res.v, dt);
  out.next.z = next_external(coupling, x.z, res.v);
  out.contact_impulse = contact_generalized_impulse(problem, res.v);
  out.next.v = std::move(res.v);
  out.stats = res.stats;
  out.geometry_queries = 1;
  return out;
}

EstimatedStep step_doubling(const StepContext& ctx, const SimState& x, double dt) {
  EstimatedStep out;
  const Model& model = *ctx.model;
  const Snapshot start = take_snapshot(model, x.t, x.q, x.v, ctx.times);

  const SolvedStep full = first_order_from(ctx, start, x.z, dt, x.v, &out.coupling_fallbacks);
  out.stats += full.stats;

  const double h = 0.5 * dt;
  const VecX warm_half = 0.5 * (x.v + full.v);
  const SolvedStep half1 = first_order_from(ctx, start, x.z, h, warm_half, &out.coupling_fallbacks);
  out.stats += half1.stats;

  const Snapshot mid = take_snapshot(model, x.t + h, half1.q, half1.v, ctx.times);
  const SolvedStep half2 = first_order_from(ctx, mid, half1.z, h, full.v, &out.coupling_fallbacks);
  out.stats += half2.stats;

  out.geometry_queries = 2;
  out.next = SimState{x.t + dt, half2.q, half2.v, half2.z};
  out.q_low = full.q;
  out.v_low = full.v;
  out.z_low = full.z;
  return out;
}

EstimatedStep trapezoid_step(const StepContext& ctx, const SimState& x, double dt,
                             const VecX& prev_contact_force) {
  EstimatedStep out;
  const Model& model = *ctx.model;
  const Snapshot start = take_snapshot(model, x.t, x.q, x.v, ctx.times);
  const auto coupling = couple(ctx, x.t, x.q, x.v, x.z, dt, start.dynamics.N);
  if (coupling && coupling->explicit_fallback) ++out.coupling_fallbacks;

  // Predictor.
  const ConvexProblem pred_problem =
      first_order_problem(ctx, start, dt, coupling ? &*coupling : nullptr);
  SolveResult pred = run_solver(ctx, pred_problem, x.v);
  out.stats += pred.stats;
  const VecX q_hat = advance_positions(model, x.q, pred.v, dt);
  const VecX z_hat = next_external(coupling, x.z, pred.v);

  const Snapshot end = take_snapshot(model, x.t + dt, q_hat, pred.v, ctx.times);

  // Corrector with averaged mass, bias and kinematic map.
  ConvexProblem corr;
  MatX N_bar;
  {
    ScopedTimer timer(slot(ctx.times, &PhaseTimes::assembly));
    corr.A = 0.5 * (start.dynamics.M + end.dynamics.M);
    const VecX bias_bar = 0.5 * (start.dynamics.bias + end.dynamics.bias);
    corr.r = corr.A * x.v - dt * bias_bar + 0.5 * dt * prev_contact_force;
    add_contact_terms(&corr, end.contacts, pred.v, dt, 0.5, &pred.v, end.t);
    add_limit_terms(&corr, model, x.q, start.dynamics.M, dt, ctx.beta);
    if (coupling) add_effort_terms(&corr, *coupling, dt);
    N_bar = 0.5 * (start.dynamics.N + end.dynamics.N);
  }
  SolveResult sol = run_solver(ctx, corr, pred.v);
  out.stats += sol.stats;

  out.geometry_queries = 2;
  out.next.t = x.t + dt;
  out.next.q = advance_positions_trapezoid(model, x.q, x.v, sol.v, dt, N_bar);
  out.next.z = next_external(coupling, x.z, sol.v);
  out.end_contact_force = contact_generalized_impulse(corr, sol.v) / dt;
  out.next.v = std::move(sol.v);
  out.q_low = q_hat;
  out.v_low = std::move(pred.v);
  out.z_low = z_hat;
  return out;
}

ConvexStepper::ConvexStepper(const Model& model, const IntegratorConfig& config,
                             const ExternalSystem* external, ConvexScheme scheme)
    : model_(model), config_(config), external_(external), scheme_(scheme) {}

void ConvexStepper::start(const SimState& x0) {
  cache_.reset();
  if (scheme_ == ConvexScheme::kTrapezoid) {
    const Snapshot s = take_snapshot(model_, x0.t, x0.q, x0.v, &times_);
    prev_contact_force_ = continuous_contact_force(s, model_.nv);
  }
}

AttemptResult ConvexStepper::attempt(const SimState& x, double dt, double solver_tolerance) {
  StepContext ctx;
  ctx.model = &model_;
  ctx.external = external_;
  ctx.solver.tolerance = solver_tolerance;
  ctx.solver.max_desired_iterations = config_.max_desired_iterations;
  ctx.solver.alpha_max = config_.alpha_max;
  ctx.solver.reuse_hessian = config_.hessian_reuse;
  ctx.solver.linesearch_init = config_.linesearch_init;
  ctx.cache = &cache_;
  ctx.beta = config_.near_rigid_beta;
  ctx.times = &times_;

  AttemptResult out;
  switch (scheme_) {
    case ConvexScheme::kSingle: {
      IcfStepResult r = icf_step(ctx, x, dt);
      out.q_low = r.next.q;
      out.v_low = r.next.v;
      out.next = std::move(r.next);
      out.stats = r.stats;
      out.geometry_queries = r.geometry_queries;
      break;
    }
    case ConvexScheme::kStepDoubling:
    case ConvexScheme::kTrapezoid: {
      EstimatedStep r = scheme_ == ConvexScheme::kStepDoubling
                            ? step_doubling(ctx, x, dt)
                            : trapezoid_step(ctx, x, dt, prev_contact_force_);
      out.next = std::move(r.next);
      out.q_low = std::move(r.q_low);
      out.v_low = std::move(r.v_low);
      out.stats = r.stats;
      out.geometry_queries = r.geometry_queries;
      out.coupling_fallbacks = r.coupling_fallbacks;
      pending_contact_force_ = std::move(r.end_contact_force);
      break;
    }
  }
  return out;
}

void ConvexStepper::accept(const AttemptResult& result, double dt) {
  (void)result, (void)dt;
  if (scheme_ == ConvexScheme::kTrapezoid) prev_contact_force_ = pending_contact_force_;
}

}  // namespace csim
