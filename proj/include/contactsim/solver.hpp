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

// Newton solver for  min_v  1/2 v'Av - r'v + sum_i w_i l_i(J_i v - o_i).

#ifndef CONTACTSIM_SOLVER_HPP_
#define CONTACTSIM_SOLVER_HPP_

#include <string>
#include <vector>

#include "contactsim/contact.hpp"
#include "contactsim/external.hpp"
#include "contactsim/types.hpp"

namespace csim {

struct ConstraintTerm {
  enum class Kind { kContact, kLimit, kEffort };
  Kind kind = Kind::kContact;
  std::vector<int> dofs;
  MatX jacobian;  // rows x dofs.size(); 3 rows for contacts, 1 otherwise
  VecX offset;    // constraint velocity y = jacobian * v[dofs] - offset
  double weight = 1.0;
  ContactPotentialData contact;
  LimitData limit;
  EffortData effort;
};

struct ConvexProblem {
  MatX A;
  VecX r;
  std::vector<ConstraintTerm> terms;

  int size() const { return static_cast<int>(r.size()); }
};

// Constraint velocity of a term.
VecX term_velocity(const ConstraintTerm& term, const VecX& v);

double evaluate_cost(const ConvexProblem& problem, const VecX& v);
VecX evaluate_gradient(const ConvexProblem& problem, const VecX& v);
MatX evaluate_hessian(const ConvexProblem& problem, const VecX& v);
// Per-term impulse -grad l_i(y_i) (unweighted), in the term's row order.
std::vector<VecX> term_impulses(const ConvexProblem& problem, const VecX& v);

struct ScaledNorms {
  double gradient = 0.0;   // ||D g||
  double rhs = 0.0;        // ||D r||
  double step = 0.0;       // ||D^-1 dv||
};
// D = diag(mass_diagonal)^(-1/2).
ScaledNorms scaled_norms(const VecX& mass_diagonal, const VecX& g, const VecX& r, const VecX& dv);

struct LinesearchResult {
  double alpha = 0.0;
  int iterations = 0;  // derivative evaluations after the alpha_max check
};

// Minimizes l(v + alpha p) over (0, alpha_max]. The first trial point is the
// minimizer of the cubic Hermite fit on [0, alpha_max] or 1 for kFixed; the
// root of the slope is then refined by safeguarded Newton (bisection
// fallback) until |slope| <= 1e-10 max(1, |slope(0)|), 50 iterations at most.
LinesearchResult exact_linesearch(const ConvexProblem& problem, const VecX& v, const VecX& p,
                                  double alpha_max, LinesearchInit init = LinesearchInit::kCubic);

enum class ConvergedBy { kNone, kEarlyExit, kGradient, kVelocityChange };
const char* converged_by_name(ConvergedBy c);

struct SolverOptions {
  double tolerance = 1e-8;
  int max_desired_iterations = 10;
  double alpha_max = 1.5;
  bool reuse_hessian = true;
  LinesearchInit linesearch_init = LinesearchInit::kCubic;
  int max_iterations = 500;
  bool record_history = false;
};

struct SolverStats {
  int iterations = 0;
  int factorizations = 0;
  int linesearch_iterations = 0;
  int cost_evaluations = 0;
  ConvergedBy converged_by = ConvergedBy::kNone;
  std::vector<double> cost_history;  // when requested: cost at every iterate

  SolverStats& operator+=(const SolverStats& o);
};

// Factorization carried across solves; refreshed when the observed
// contraction rate says the stale matrix will not converge in time.
struct HessianCache {
  Eigen::LLT<MatX> factor;
  bool valid = false;
  void reset() { valid = false; }
};

struct SolveResult {
  VecX v;
  SolverStats stats;
};

class SolverStall : public RuntimeFailure {
 public:
  SolverStall(const std::string& what, SolverStats stats)
      : RuntimeFailure(what), stats_(std::move(stats)) {}
  const SolverStats& stats() const { return stats_; }

 private:
  SolverStats stats_;
};

SolveResult solve(const ConvexProblem& problem, const VecX& v_guess, const SolverOptions& options,
                  HessianCache& cache);

}  // namespace csim

#endif  // CONTACTSIM_SOLVER_HPP_
