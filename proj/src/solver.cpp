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

#include "contactsim/solver.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace csim {
namespace {

constexpr int kMaxLinesearchIterations = 50;
constexpr double kLinesearchTolerance = 1e-10;

// Potential of one term at constraint velocity y: value, gradient, Hessian.
struct TermEval {
  double value = 0.0;
  VecX gradient;
  MatX hessian;
};

TermEval eval_term(const ConstraintTerm& t, const VecX& y, bool want_hessian) {
  TermEval out;
  switch (t.kind) {
    case ConstraintTerm::Kind::kContact: {
      const Potential3 p = contact_potential(Vec3(y[0], y[1], y[2]), t.contact);
      out.value = p.value;
      out.gradient = p.gradient;
      if (want_hessian) out.hessian = p.hessian;
      break;
    }
    case ConstraintTerm::Kind::kLimit: {
      const Potential1 p = limit_potential(y[0], t.limit);
      out.value = p.value;
      out.gradient = VecX::Constant(1, p.gradient);
      if (want_hessian) out.hessian = MatX::Constant(1, 1, p.hessian);
      break;
    }
    case ConstraintTerm::Kind::kEffort: {
      const EffortPotential p = effort_limit_potential(y[0], t.effort);
      out.value = p.value;
      out.gradient = VecX::Constant(1, p.gradient);
      if (want_hessian) out.hessian = MatX::Constant(1, 1, p.hessian);
      break;
    }
  }
  return out;
}

VecX gather(const VecX& v, const std::vector<int>& dofs) {
  VecX out(dofs.size());
  for (size_t i = 0; i < dofs.size(); ++i) out[i] = v[dofs[i]];
  return out;
}

// phi(alpha) = l(v + alpha p), with everything linear in alpha precomputed.
class LineFunction {
 public:
  LineFunction(const ConvexProblem& pr, const VecX& v, const VecX& p) : pr_(pr) {
    const VecX av = pr.A * v;
    const VecX ap = pr.A * p;
    base_ = 0.5 * v.dot(av) - pr.r.dot(v);
    slope_ = p.dot(av) - pr.r.dot(p);
    curvature_ = p.dot(ap);
    y0_.reserve(pr.terms.size());
    dy_.reserve(pr.terms.size());
    for (const auto& t : pr.terms) {
      y0_.push_back(t.jacobian * gather(v, t.dofs) - t.offset);
      dy_.push_back(t.jacobian * gather(p, t.dofs));
    }
  }

  // Returns phi; fills the first and second derivative.
  double eval(double a, double* d1, double* d2) const {
    double f = base_ + a * slope_ + 0.5 * a * a * curvature_;
    double g = slope_ + a * curvature_;
    double h = curvature_;
    for (size_t i = 0; i < pr_.terms.size(); ++i) {
      const ConstraintTerm& t = pr_.terms[i];
      const TermEval e = eval_term(t, y0_[i] + a * dy_[i], d2 != nullptr);
      f += t.weight * e.value;
      g += t.weight * e.gradient.dot(dy_[i]);
      if (d2) h += t.weight * dy_[i].dot(e.hessian * dy_[i]);
    }
    if (d1) *d1 = g;
    if (d2) *d2 = h;
    return f;
  }

 private:
  const ConvexProblem& pr_;
  double base_ = 0.0, slope_ = 0.0, curvature_ = 0.0;
  std::vector<VecX> y0_, dy_;
};

}  // namespace

VecX term_velocity(const ConstraintTerm& t, const VecX& v) {
  return t.jacobian * gather(v, t.dofs) - t.offset;
}

double evaluate_cost(const ConvexProblem& pr, const VecX& v) {
  double f = 0.5 * v.dot(pr.A * v) - pr.r.dot(v);
  for (const auto& t : pr.terms) f += t.weight * eval_term(t, term_velocity(t, v), false).value;
  return f;
}

VecX evaluate_gradient(const ConvexProblem& pr, const VecX& v) {
  VecX g = pr.A * v - pr.r;
  for (const auto& t : pr.terms) {
    const TermEval e = eval_term(t, term_velocity(t, v), false);
    const VecX local = t.weight * (t.jacobian.transpose() * e.gradient);
    for (size_t i = 0; i < t.dofs.size(); ++i) g[t.dofs[i]] += local[i];
  }
  return g;
}

MatX evaluate_hessian(const ConvexProblem& pr, const VecX& v) {
  MatX H = pr.A;
  for (const auto& t : pr.terms) {
    const TermEval e = eval_term(t, term_velocity(t, v), true);
    const MatX local = t.weight * (t.jacobian.transpose() * e.hessian * t.jacobian);
    for (size_t i = 0; i < t.dofs.size(); ++i)
      for (size_t j = 0; j < t.dofs.size(); ++j) H(t.dofs[i], t.dofs[j]) += local(i, j);
  }
  return H;
}

std::vector<VecX> term_impulses(const ConvexProblem& pr, const VecX& v) {
  std::vector<VecX> out;
  out.reserve(pr.terms.size());
  for (const auto& t : pr.terms) out.push_back(-eval_term(t, term_velocity(t, v), false).gradient);
  return out;
}

ScaledNorms scaled_norms(const VecX& mass_diagonal, const VecX& g, const VecX& r, const VecX& dv) {
  const VecX d = mass_diagonal.cwiseSqrt().cwiseInverse();
  ScaledNorms n;
  n.gradient = d.cwiseProduct(g).norm();
  n.rhs = d.cwiseProduct(r).norm();
  n.step = dv.size() ? dv.cwiseQuotient(d).norm() : 0.0;
  return n;
}

LinesearchResult exact_linesearch(const ConvexProblem& pr, const VecX& v, const VecX& p,
                                  double alpha_max, LinesearchInit init) {
  const LineFunction line(pr, v, p);
  LinesearchResult out;
  double d0, d1;
  const double f0 = line.eval(0.0, &d0, nullptr);
  if (!(d0 < 0.0)) throw RuntimeFailure("linesearch: search direction is not a descent direction");
  const double f1 = line.eval(alpha_max, &d1, nullptr);
  if (d1 <= 0.0) {
    out.alpha = alpha_max;
    return out;
  }
  const double tol = kLinesearchTolerance * std::max(1.0, std::abs(d0));

  double lo = 0.0, hi = alpha_max;
  double alpha;
  if (init == LinesearchInit::kFixed) {
    alpha = std::min(1.0, alpha_max);
  } else {
    const double a = alpha_max;
    const double df = (f1 - f0) / a;
    const double c2 = (3.0 * df - 2.0 * d0 - d1) / a;
    const double c3 = (d0 + d1 - 2.0 * df) / (a * a);
    const double disc = c2 * c2 - 3.0 * c3 * d0;
    const double denom = c2 + std::sqrt(std::max(0.0, disc));
    alpha = denom > 0.0 ? -d0 / denom : 0.5 * a;
  }
  if (!(alpha > lo && alpha < hi)) alpha = 0.5 * (lo + hi);

  double best_alpha = alpha, best_f = f0;
  bool have_best = false;
  double dx_old = hi - lo, dx = dx_old;
  for (int it = 0; it < kMaxLinesearchIterations; ++it) {
    double d, dd;
    const double f = line.eval(alpha, &d, &dd);
    ++out.iterations;
    if (!have_best || f < best_f) {
      best_f = f;
      best_alpha = alpha;
      have_best = true;
    }
    if (std::abs(d) <= tol) {
      best_alpha = alpha;
      break;
    }
    if (d < 0.0) lo = alpha;
    else hi = alpha;
    const double newton = dd > 0.0 ? alpha - d / dd : -1.0;
    if (dd > 0.0 && newton > lo && newton < hi && std::abs(d / dd) < 0.5 * std::abs(dx_old)) {
      dx_old = dx;
      dx = d / dd;
      alpha = newton;
    } else {
      dx_old = dx;
      dx = 0.5 * (hi - lo);
      alpha = lo + dx;
    }
    if (hi - lo <= 1e-15 * alpha_max) break;
  }
  out.alpha = best_alpha;
  return out;
}

const char* converged_by_name(ConvergedBy c) {
  switch (c) {
    case ConvergedBy::kNone: return "none";
    case ConvergedBy::kEarlyExit: return "early_exit";
    case ConvergedBy::kGradient: return "gradient";
    case ConvergedBy::kVelocityChange: return "velocity_change";
  }
  return "none";
}

SolverStats& SolverStats::operator+=(const SolverStats& o) {
  iterations += o.iterations;
  factorizations += o.factorizations;
  linesearch_iterations += o.linesearch_iterations;
  cost_evaluations += o.cost_evaluations;
  return *this;
}

SolveResult solve(const ConvexProblem& pr, const VecX& v_guess, const SolverOptions& opt,
                  HessianCache& cache) {
  SolveResult res;
  SolverStats& st = res.stats;
  VecX v = v_guess;
  const VecX mass_diag = pr.A.diagonal();
  const int n = pr.size();
  if (cache.valid && cache.factor.rows() != n) cache.reset();

  VecX g = evaluate_gradient(pr, v);
  ScaledNorms norms = scaled_norms(mass_diag, g, pr.r, VecX());
  const double target = opt.tolerance * std::max(1.0, norms.rhs);
  if (opt.record_history) {
    st.cost_history.push_back(evaluate_cost(pr, v));
    ++st.cost_evaluations;
  }
  if (norms.gradient <= target) {
    st.converged_by = ConvergedBy::kEarlyExit;
    res.v = v;
    return res;
  }

  auto refactor = [&]() {
    cache.factor.compute(evaluate_hessian(pr, v));
    if (cache.factor.info() != Eigen::Success)
      throw RuntimeFailure("solver: Hessian factorization failed (matrix not positive definite)");
    cache.valid = true;
    ++st.factorizations;
  };

  std::optional<double> theta;
  double prev_step = 0.0;
  for (int i = 0; i < opt.max_iterations; ++i) {
    bool fresh = false;
    bool refresh = !opt.reuse_hessian || !cache.valid;
    if (!refresh && theta) {
      const double th = *theta;
      const double exponent = static_cast<double>(opt.max_desired_iterations - i);
      refresh = th >= 1.0 || std::pow(th, exponent) / (1.0 - th) * prev_step >= target;
    }
    if (refresh) {
      refactor();
      fresh = true;
    }
    VecX p = -cache.factor.solve(g);
    if (!(g.dot(p) < 0.0)) {
      if (fresh) throw RuntimeFailure("solver: Newton direction is not a descent direction");
      refactor();
      p = -cache.factor.solve(g);
      if (!(g.dot(p) < 0.0))
        throw RuntimeFailure("solver: Newton direction is not a descent direction");
    }
    const LinesearchResult ls = exact_linesearch(pr, v, p, opt.alpha_max, opt.linesearch_init);
    st.linesearch_iterations += ls.iterations;
    st.cost_evaluations += ls.iterations + 2;
    const VecX dv = ls.alpha * p;
    v += dv;
    ++st.iterations;
    if (!v.allFinite()) throw RuntimeFailure("solver: non-finite iterate");
    g = evaluate_gradient(pr, v);
    norms = scaled_norms(mass_diag, g, pr.r, dv);
    if (opt.record_history) {
      st.cost_history.push_back(evaluate_cost(pr, v));
      ++st.cost_evaluations;
    }
    if (i > 0) theta = prev_step > 0.0 ? norms.step / prev_step : 0.0;
    prev_step = norms.step;
    if (norms.gradient <= target) {
      st.converged_by = ConvergedBy::kGradient;
      res.v = v;
      return res;
    }
    if (theta && *theta < 1.0) {
      const double eta = *theta / (1.0 - *theta);
      if (eta * norms.step <= target) {
        st.converged_by = ConvergedBy::kVelocityChange;
        res.v = v;
        return res;
      }
    }
  }
  throw SolverStall("solver: no convergence after " + std::to_string(opt.max_iterations) +
                        " iterations (" + std::to_string(st.factorizations) + " factorizations)",
                    st);
}

}  // namespace csim
