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

#include "contactsim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "contactsim/output.hpp"

namespace csim {
namespace {

struct CellOutcome {
  std::string status;
  Trajectory traj;
  bool has_trajectory = false;
};

CellOutcome run_cell(const Model& model, Scheme scheme, double accuracy,
                     const SweepOptions& options) {
  CellOutcome out;
  IntegratorConfig config = model.integrator;
  config.scheme = scheme;
  config.accuracy = accuracy;
  config.fixed_step.reset();
  AdvanceOptions adv;
  adv.duration = options.duration;
  adv.sample_rate = options.sample_rate;
  adv.record_steps = false;
  const double t_end = options.duration.value_or(model.duration);
  adv.wall_budget = options.timeout_factor * t_end;
  try {
    out.traj = advance(model, config, adv);
    out.status = run_status_name(out.traj.status);
    out.has_trajectory = true;
  } catch (const SimError& e) {
    out.status = std::string(category_name(e.category())) + "_error";
  }
  return out;
}

}  // namespace

double trajectory_distance(const Trajectory& a, const Trajectory& b, const VecX& weights) {
  const size_t n = std::min(a.samples.size(), b.samples.size());
  double d = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const VecX diff = a.samples[i].q - b.samples[i].q;
    for (int k = 0; k < diff.size(); ++k)
      d = std::max(d, std::abs((weights.size() ? weights[k] : 1.0) * diff[k]));
  }
  return d;
}

SweepResult run_sweep(const SweepOptions& options) {
  const Model model = assemble_model(options.scenario);
  SweepResult result;

  struct Cell {
    Scheme scheme;
    double accuracy;
    CellOutcome outcome;
  };
  std::vector<Cell> cells;
  for (Scheme s : options.schemes)
    for (double a : options.accuracies) cells.push_back({s, a, {}});

  // The reference run is cell 0 of the work list.
  std::optional<double> ref_acc = options.reference_accuracy;
  if (!ref_acc && !options.accuracies.empty())
    ref_acc = *std::min_element(options.accuracies.begin(), options.accuracies.end());
  CellOutcome reference;

  std::atomic<size_t> next{0};
  const size_t total = cells.size() + (ref_acc ? 1 : 0);
  auto worker = [&] {
    for (size_t i = next++; i < total; i = next++) {
      if (ref_acc && i == 0) {
        reference = run_cell(model, options.reference_scheme, *ref_acc, options);
        continue;
      }
      Cell& c = cells[i - (ref_acc ? 1 : 0)];
      c.outcome = run_cell(model, c.scheme, c.accuracy, options);
    }
  };
  const int jobs = std::max(1, options.jobs);
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  result.reference_accuracy = ref_acc;
  result.reference_status = ref_acc ? reference.status : "none";
  const bool have_ref = reference.has_trajectory && reference.traj.status == RunStatus::kOk;
  for (Cell& c : cells) {
    SweepRow row;
    row.scheme = c.scheme;
    row.accuracy = c.accuracy;
    row.status = c.outcome.status;
    if (c.outcome.has_trajectory) {
      row.totals = c.outcome.traj.totals;
      if (c.outcome.traj.status == RunStatus::kOk) {
        row.digest = state_digest(c.outcome.traj.final_state.q, c.outcome.traj.final_state.v);
        if (have_ref)
          row.error_vs_reference =
              trajectory_distance(c.outcome.traj, reference.traj, model.position_weights);
      }
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

void write_sweep_csv(std::ostream& os, const std::string& scenario, const SweepResult& result,
                     bool with_timing) {
  os << "scenario,scheme,accuracy,status,steps_attempted,steps_accepted,steps_rejected,"
        "geometry_queries,newton_iterations,factorizations,linesearch_iterations,"
        "final_state_digest,reference_accuracy,error_vs_reference";
  if (with_timing) os << ",wall_time";
  os << '\n';
  for (const SweepRow& r : result.rows) {
    const RunTotals& t = r.totals;
    os << scenario << ',' << scheme_name(r.scheme) << ',' << format_number(r.accuracy) << ','
       << r.status << ',' << t.attempted << ',' << t.accepted << ',' << t.rejected << ','
       << t.geometry_queries << ',' << t.iterations << ',' << t.factorizations << ','
       << t.linesearch_iterations << ',' << r.digest << ','
       << (result.reference_accuracy ? format_number(*result.reference_accuracy) : "") << ','
       << (r.error_vs_reference ? format_number(*r.error_vs_reference) : "");
    if (with_timing) os << ',' << format_number(t.wall_time);
    os << '\n';
  }
}

}  // namespace csim
