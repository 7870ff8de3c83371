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

#include "contactsim/integrate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "contactsim/baselines.hpp"
#include "contactsim/dynamics.hpp"
#include "contactsim/icf.hpp"

namespace csim {
namespace {

constexpr double kMinStep = 1e-12;
constexpr double kFixedModeSolverTolerance = 1e-8;

bool finite(const SimState& s) { return s.q.allFinite() && s.v.allFinite() && s.z.allFinite(); }

double weight(const VecX& w, int i) { return w.size() == 0 ? 1.0 : w[i]; }

// Emits dense output samples on the uniform grid that fall in (t0, t1].
class SampleGrid {
 public:
  SampleGrid(std::optional<double> rate, double t_end) : rate_(rate), t_end_(t_end) {}

  template <typename Emit>
  void step(double t0, double t1, bool last, Emit&& emit) {
    if (!rate_) {
      emit(t1, 1.0);
      return;
    }
    for (;;) {
      const double ts = static_cast<double>(next_) / *rate_;
      if (ts > t_end_ * (1.0 + 1e-14)) return;
      if (ts > t1 && !last) return;
      const double s = t1 > t0 ? std::clamp((ts - t0) / (t1 - t0), 0.0, 1.0) : 1.0;
      emit(ts, s);
      ++next_;
    }
  }
  void skip_origin() { next_ = rate_ ? 1 : 0; }

 private:
  std::optional<double> rate_;
  double t_end_;
  long next_ = 0;
};

}  // namespace

double error_norm(const VecX& q, const VecX& q_hat, const VecX& weights) {
  double e = 0.0;
  for (int i = 0; i < q.size(); ++i) e = std::max(e, std::abs(weight(weights, i) * (q[i] - q_hat[i])));
  return e;
}

double full_state_error_norm(const VecX& q, const VecX& q_hat, const VecX& v, const VecX& v_hat,
                             const VecX& weights) {
  double e = error_norm(q, q_hat, weights);
  if (v.size() > 0) e = std::max(e, (v - v_hat).cwiseAbs().maxCoeff());
  return e;
}

double adjust_step_size(double dt, double e, double eps, int p, const IntegratorConfig& c) {
  const double grow_cap = std::min(c.k_max_grow * dt, c.max_step);
  if (!(e > 0.0)) return grow_cap;
  const double candidate = c.k_safe * dt * std::pow(eps / e, 1.0 / p);
  const double ratio = candidate / dt;
  const double banded = (ratio > c.k_low && ratio < c.k_high) ? dt : candidate;
  return std::min(banded, grow_cap);
}

bool is_fixed_step(const IntegratorConfig& c) {
  return c.fixed_step.has_value() || c.scheme == Scheme::kFixed;
}

double solver_tolerance(const IntegratorConfig& c) {
  if (is_fixed_step(c)) return kFixedModeSolverTolerance;
  return std::max(c.kappa * c.accuracy, kFixedModeSolverTolerance);
}

const char* run_status_name(RunStatus s) {
  switch (s) {
    case RunStatus::kOk:
      return "ok";
    case RunStatus::kBudgetExceeded:
      return "budget";
    case RunStatus::kTimeout:
      return "timeout";
  }
  return "unknown";
}

std::unique_ptr<Stepper> make_stepper(const Model& model, const IntegratorConfig& config,
                                      const ExternalSystem* external) {
  switch (config.scheme) {
    case Scheme::kCenic1:
      return std::make_unique<ConvexStepper>(model, config, external, ConvexScheme::kStepDoubling);
    case Scheme::kCenic2:
      return std::make_unique<ConvexStepper>(model, config, external, ConvexScheme::kTrapezoid);
    case Scheme::kFixed:
      return std::make_unique<ConvexStepper>(model, config, external, ConvexScheme::kSingle);
    case Scheme::kImplicitEuler:
      return std::make_unique<ImplicitEulerStepper>(model, external);
    case Scheme::kRk3:
      return std::make_unique<Rk3Stepper>(model, external);
  }
  throw ConfigurationError("unknown scheme");
}

VecX interpolate_positions(const Model& model, const VecX& q0, const VecX& q1, double s) {
  VecX q = (1.0 - s) * q0 + s * q1;
  normalize_quaternions(model, q);
  return q;
}

Trajectory advance(const Model& model, const IntegratorConfig& config,
                   const AdvanceOptions& options) {
  validate_integrator(config);
  const auto wall_start = std::chrono::steady_clock::now();
  auto wall = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  };

  const std::unique_ptr<ExternalSystem> external = make_controller(model);
  const std::unique_ptr<Stepper> stepper = make_stepper(model, config, external.get());
  const bool fixed = is_fixed_step(config);
  const double t_end = options.duration.value_or(model.duration);
  const double eps = config.accuracy;
  const double tol = solver_tolerance(config);
  const int order = stepper->error_order();
  const VecX weights = config.position_weights.size() == static_cast<size_t>(model.nq)
                           ? Eigen::Map<const VecX>(config.position_weights.data(), model.nq)
                           : model.position_weights;

  Trajectory out;
  RunTotals& tot = out.totals;
  SimState x;
  x.q = model.q0;
  x.v = model.v0;
  x.z = external ? external->initial_state() : VecX();
  stepper->start(x);

  SampleGrid grid(options.sample_rate, t_end);
  if (options.record_samples) out.samples.push_back(Sample{0.0, x.q, x.v, 0.0, 0.0});
  grid.skip_origin();

  double dt = fixed ? config.fixed_step.value_or(config.max_step) : config.k_init * config.max_step;
  int consecutive_nonfinite = 0;

  while (t_end - x.t > 1e-12 * std::max(1.0, t_end)) {
    if (options.max_attempts > 0 && tot.attempted >= options.max_attempts) {
      out.status = RunStatus::kBudgetExceeded;
      break;
    }
    if (options.max_geometry_queries > 0 && tot.geometry_queries >= options.max_geometry_queries) {
      out.status = RunStatus::kBudgetExceeded;
      break;
    }
    if (options.wall_budget > 0.0 && wall() > options.wall_budget) {
      out.status = RunStatus::kTimeout;
      break;
    }

    const double remaining = t_end - x.t;
    double dt_try = std::min(dt, remaining);
    if (remaining - dt_try < 1e-6 * dt_try) dt_try = remaining;
    const bool last = dt_try == remaining;
    if (dt_try < kMinStep) {
      std::ostringstream msg;
      msg << "step size underflow: dt = " << dt_try << " s at t = " << x.t
          << " s; the scene is too stiff for the requested accuracy";
      throw RuntimeFailure(msg.str());
    }

    AttemptResult r = stepper->attempt(x, dt_try, tol);
    ++tot.attempted;
    tot.iterations += r.stats.iterations;
    tot.factorizations += r.stats.factorizations;
    tot.linesearch_iterations += r.stats.linesearch_iterations;
    tot.cost_evaluations += r.stats.cost_evaluations;
    tot.geometry_queries += r.geometry_queries;
    tot.coupling_fallbacks += r.coupling_fallbacks;

    StepRecord rec;
    rec.t = x.t;
    rec.dt = dt_try;
    rec.iterations = r.stats.iterations;
    rec.factorizations = r.stats.factorizations;
    rec.linesearch_iterations = r.stats.linesearch_iterations;
    rec.geometry_queries = r.geometry_queries;

    double e = std::numeric_limits<double>::quiet_NaN();
    if (!r.failed && finite(r.next) && r.q_low.allFinite() && r.v_low.allFinite()) {
      e = config.error_norm == ErrorNormKind::kFullState
              ? full_state_error_norm(r.next.q, r.q_low, r.next.v, r.v_low, weights)
              : error_norm(r.next.q, r.q_low, weights);
    }

    if (r.failed && finite(r.next)) {
      // Baseline Newton failure: reject and shrink hard.
      ++tot.rejected;
      rec.error = std::numeric_limits<double>::infinity();
      if (options.record_steps) out.records.push_back(rec);
      if (fixed) throw RuntimeFailure("Newton iteration failed in fixed-step mode");
      dt = 0.25 * dt_try;
      continue;
    }
    if (!std::isfinite(e)) {
      ++tot.rejected;
      ++tot.nonfinite_retries;
      rec.error = std::numeric_limits<double>::infinity();
      if (options.record_steps) out.records.push_back(rec);
      if (++consecutive_nonfinite > config.max_nonfinite_retries) {
        std::ostringstream msg;
        msg << "non-finite state after " << config.max_nonfinite_retries
            << " halved retries at t = " << x.t << " s";
        throw RuntimeFailure(msg.str());
      }
      dt = 0.5 * dt_try;
      continue;
    }
    consecutive_nonfinite = 0;

    rec.error = e;
    rec.accepted = fixed || e <= eps;
    if (options.record_steps) out.records.push_back(rec);

    if (rec.accepted) {
      ++tot.accepted;
      stepper->accept(r, dt_try);
      tot.min_step = tot.accepted == 1 ? dt_try : std::min(tot.min_step, dt_try);
      tot.max_step = std::max(tot.max_step, dt_try);
      out.accepted_time += dt_try;
      const double t0 = x.t;
      SimState next = std::move(r.next);
      if (last) next.t = t_end;
      if (options.record_samples) {
        grid.step(t0, next.t, last, [&](double ts, double s) {
          Sample smp;
          smp.t = ts;
          smp.q = s >= 1.0 ? next.q : interpolate_positions(model, x.q, next.q, s);
          smp.v = (1.0 - s) * x.v + s * next.v;
          smp.error = e;
          smp.dt = dt_try;
          out.samples.push_back(std::move(smp));
        });
      }
      x = std::move(next);
    } else {
      ++tot.rejected;
    }

    if (!fixed) {
      dt = adjust_step_size(dt_try, e, eps, order, config);
      if (!rec.accepted && dt >= dt_try) dt = config.k_safe * dt_try;
    }
  }

  out.final_state = x;
  tot.phases = stepper->times();
  tot.wall_time = wall();
  return out;
}

}  // namespace csim
