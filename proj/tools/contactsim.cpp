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

// contactsim command-line front end.
//
//   contactsim simulate --scenario ball_drop --accuracy 1e-3 --out traj.csv
//   contactsim sweep --scenario soft_clutter --schemes cenic1,cenic2 \
//       --accuracies 1e-1,1e-2,1e-3 --jobs 4 --out sweep.csv
//   contactsim list
//   contactsim dump --scenario hard_clutter --seed 3
//
// Exit codes: 0 ok, 1 runtime failure, 2 validation or configuration error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "contactsim/integrate.hpp"
#include "contactsim/model.hpp"
#include "contactsim/output.hpp"
#include "contactsim/scenario_io.hpp"
#include "contactsim/scenarios.hpp"
#include "contactsim/sweep.hpp"
#include "json.hpp"

namespace {

using namespace csim;

int exit_code(ErrorCategory c) { return c == ErrorCategory::kRuntime ? 1 : 2; }

void report_error(const std::string& category, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = category;
  j["message"] = message;
  std::cerr << j.dump() << '\n';
}

// Writes to `path`, or stdout when empty.
template <typename Writer>
void emit(const std::string& path, Writer&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw RuntimeFailure("cannot open output file: " + path);
  write(os);
  if (!os) throw RuntimeFailure("failed writing output file: " + path);
}

struct SimulateFlags {
  std::string scenario;
  std::optional<std::string> scheme;
  std::optional<double> accuracy, max_step, fixed_step, duration, sample_rate;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> error_norm, linesearch;
  bool no_reuse = false;
  std::string out, report;
};

struct SweepFlags {
  std::string scenario;
  std::vector<std::string> schemes{"cenic1", "cenic2"};
  std::vector<double> accuracies{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  std::optional<double> duration, reference_accuracy;
  std::string reference_scheme = "cenic1";
  double sample_rate = 100.0;
  double timeout_factor = 100.0;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  bool with_timing = false;
  std::string out;
};

int cmd_simulate(const SimulateFlags& f) {
  ScenarioSpec spec = resolve_scenario(f.scenario, f.seed);
  IntegratorConfig& c = spec.integrator;
  if (f.scheme) c.scheme = parse_scheme(*f.scheme);
  if (f.accuracy) c.accuracy = *f.accuracy;
  if (f.max_step) c.max_step = *f.max_step;
  if (f.fixed_step) c.fixed_step = *f.fixed_step;
  if (f.error_norm) {
    if (*f.error_norm == "position") c.error_norm = ErrorNormKind::kPosition;
    else if (*f.error_norm == "full" || *f.error_norm == "full_state")
      c.error_norm = ErrorNormKind::kFullState;
    else
      throw ValidationError("--error-norm: expected position, full or full_state");
  }
  if (f.linesearch) {
    if (*f.linesearch == "cubic") c.linesearch_init = LinesearchInit::kCubic;
    else if (*f.linesearch == "fixed") c.linesearch_init = LinesearchInit::kFixed;
    else throw ValidationError("--linesearch: expected cubic or fixed");
  }
  if (f.no_reuse) c.hessian_reuse = false;
  if (f.duration) {
    if (!(*f.duration > 0.0)) throw ValidationError("--duration: must be positive");
    spec.duration = *f.duration;
  }
  if (f.sample_rate && !(*f.sample_rate > 0.0))
    throw ValidationError("--sample-rate: must be positive");

  const Model model = assemble_model(spec);
  AdvanceOptions opts;
  opts.sample_rate = f.sample_rate;
  opts.record_steps = false;
  const Trajectory traj = advance(model, model.integrator, opts);

  emit(f.out, [&](std::ostream& os) { write_trajectory_csv(os, model, traj); });
  if (!f.report.empty())
    emit(f.report, [&](std::ostream& os) { os << run_report_json(model, model.integrator, traj); });
  return 0;
}

int cmd_sweep(const SweepFlags& f) {
  SweepOptions opts;
  opts.scenario = resolve_scenario(f.scenario, f.seed);
  for (const auto& s : f.schemes) opts.schemes.push_back(parse_scheme(s));
  opts.accuracies = f.accuracies;
  for (double a : opts.accuracies)
    if (!(a > 0.0)) throw ValidationError("--accuracies: values must be positive");
  opts.duration = f.duration;
  opts.sample_rate = f.sample_rate;
  opts.timeout_factor = f.timeout_factor;
  opts.jobs = f.jobs;
  opts.reference_scheme = parse_scheme(f.reference_scheme);
  opts.reference_accuracy = f.reference_accuracy;
  const SweepResult result = run_sweep(opts);
  emit(f.out, [&](std::ostream& os) {
    write_sweep_csv(os, opts.scenario.name, result, f.with_timing);
  });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Error-controlled rigid-body contact simulator"};
  app.require_subcommand(1);

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Run one simulation and write a trajectory CSV");
  simulate->add_option("--scenario", sim.scenario, "Builtin name or JSON file")->required();
  simulate->add_option("--scheme", sim.scheme, "cenic1 | cenic2 | ie | rk3 | fixed");
  simulate->add_option("--accuracy", sim.accuracy, "Target accuracy");
  simulate->add_option("--max-step", sim.max_step, "Largest step size, s");
  simulate->add_option("--fixed-step", sim.fixed_step, "Fixed step size, s");
  simulate->add_option("--duration", sim.duration, "Simulated time, s");
  simulate->add_option("--sample-rate", sim.sample_rate, "Output rate, Hz");
  simulate->add_option("--seed", sim.seed, "Seed for randomized scenarios");
  simulate->add_option("--error-norm", sim.error_norm, "position | full | full_state");
  simulate->add_option("--linesearch", sim.linesearch, "cubic | fixed");
  simulate->add_flag("--no-hessian-reuse", sim.no_reuse, "Refactor the Hessian every iteration");
  simulate->add_option("--out", sim.out, "Trajectory CSV path (default stdout)");
  simulate->add_option("--report", sim.report, "Run report JSON path");

  SweepFlags sw;
  auto* sweep = app.add_subcommand("sweep", "Run a scheme x accuracy work-precision sweep");
  sweep->add_option("--scenario", sw.scenario, "Builtin name or JSON file")->required();
  sweep->add_option("--schemes", sw.schemes, "Comma separated schemes")->delimiter(',');
  sweep->add_option("--accuracies", sw.accuracies, "Comma separated accuracies")->delimiter(',');
  sweep->add_option("--duration", sw.duration, "Simulated time, s");
  sweep->add_option("--sample-rate", sw.sample_rate, "Comparison grid, Hz");
  sweep->add_option("--jobs", sw.jobs, "Concurrent cells")->check(CLI::PositiveNumber);
  sweep->add_option("--timeout-factor", sw.timeout_factor,
                    "Wall seconds allowed per simulated second");
  sweep->add_option("--reference-scheme", sw.reference_scheme, "Scheme of the reference run");
  sweep->add_option("--reference-accuracy", sw.reference_accuracy,
                    "Reference accuracy (default: tightest)");
  sweep->add_option("--seed", sw.seed, "Seed for randomized scenarios");
  sweep->add_flag("--with-timing", sw.with_timing, "Add a wall_time column");
  sweep->add_option("--out", sw.out, "Sweep CSV path (default stdout)");

  auto* list = app.add_subcommand("list", "List builtin scenarios");

  std::string dump_name;
  std::optional<std::uint64_t> dump_seed;
  auto* dump = app.add_subcommand("dump", "Print a scenario as JSON");
  dump->add_option("--scenario", dump_name, "Builtin name or JSON file")->required();
  dump->add_option("--seed", dump_seed, "Seed for randomized scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*sweep) return cmd_sweep(sw);
    if (*list) {
      for (const auto& n : builtin_scenario_names()) std::cout << n << '\n';
      return 0;
    }
    if (*dump) {
      const ScenarioSpec spec = resolve_scenario(dump_name, dump_seed);
      assemble_model(spec);
      std::cout << scenario_to_json(spec);
      return 0;
    }
  } catch (const SimError& e) {
    report_error(category_name(e.category()), e.what());
    return exit_code(e.category());
  } catch (const std::exception& e) {
    report_error("runtime", e.what());
    return 1;
  }
  return 0;
}
