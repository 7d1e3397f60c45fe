// Copyright 2026 The flyby-dp Authors
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

// flyby_dp: command-line front end over the C API.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "flyby_dp.h"

namespace {

constexpr int kExitInput = 3;

struct Failure {
  fdp_status code;
  std::string message;
  int stage = -1;
};

void check(fdp_status st) {
  if (st != FDP_OK) throw Failure{st, fdp_last_error(), fdp_last_error_stage()};
}

[[noreturn]] void input_error(const std::string& msg) { throw Failure{FDP_INPUT_ERROR, msg}; }

struct CString {
  char* p = nullptr;
  ~CString() { fdp_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
};
using Catalog = Handle<fdp_catalog, fdp_catalog_free>;
using SequenceH = Handle<fdp_sequence, fdp_sequence_free>;
using SolutionH = Handle<fdp_solution, fdp_solution_free>;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) input_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) input_error("cannot write " + path);
  out << text;
  if (!out) input_error("write failed: " + path);
}

struct Options {
  std::string catalog;
  std::string sequence;
  std::string solution;
  std::string out;
  std::string history;
  // Constraints at the boundary: km/s, kg, s, days.
  double v_inf_max_kms = 4.0;
  std::optional<double> v_flyby_max_kms;
  double isp = 3000.0;
  double m0 = 1500.0;
  double m_min = 500.0;
  double t_max_days = 10.0 * 365.25;
  // Grid
  double step = 32.0;
  std::optional<double> start;
  std::optional<double> end;
  double min_leg = 0.0;
  double max_leg = 0.0;
  int max_revs = 0;
  std::optional<int> workers;
  // Refinement
  double initial_step = 32.0;
  double factor = 2.0;
  int tube = 2;
  double final_step = 0.01;
  // Error statistics
  std::vector<double> steps{1.0, 0.1, 0.01, 0.001};
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  std::string rounding = "worst";
  double sample_days = 0.5;
  double eps_max_kms = -1.0;
  std::string from;
  std::string in;
  bool json = false;
};

int resolve_workers(const Options& o) {
  if (o.workers) return *o.workers;
  if (const char* env = std::getenv("FLYBY_DP_WORKERS")) {
    try {
      std::size_t used = 0;
      const int w = std::stoi(env, &used);
      if (used == std::string(env).size() && w >= 1) return w;
    } catch (const std::exception&) {
    }
    input_error(std::string("FLYBY_DP_WORKERS must be a positive integer, got '") + env + "'");
  }
  return 1;
}

fdp_constraints constraints_of(const Options& o) {
  fdp_constraints c;
  fdp_constraints_default(&c);
  c.v_inf_departure_max_mps = o.v_inf_max_kms * 1000.0;
  if (o.v_flyby_max_kms) {
    c.has_v_flyby_max = 1;
    c.v_flyby_max_mps = *o.v_flyby_max_kms * 1000.0;
  }
  c.isp_s = o.isp;
  c.m0_kg = o.m0;
  c.m_min_kg = o.m_min;
  c.t_max_s = o.t_max_days * 86400.0;
  return c;
}

fdp_grid grid_of(const Options& o) {
  fdp_grid g;
  fdp_grid_default(&g);
  g.step_days = o.step;
  if (o.start) g.has_start = 1, g.start_mjd2000 = *o.start;
  if (o.end) g.has_end = 1, g.end_mjd2000 = *o.end;
  g.min_leg_days = o.min_leg;
  g.max_leg_days = o.max_leg;
  g.max_revolutions = o.max_revs;
  g.workers = resolve_workers(o);
  return g;
}

void load_inputs(const Options& o, Catalog& cat, SequenceH* seq) {
  check(fdp_catalog_load(o.catalog.c_str(), &cat.p));
  if (seq) check(fdp_sequence_load(cat.p, o.sequence.c_str(), &seq->p));
}

void print_summary(const fdp_solution* sol, double seconds) {
  const double dv = fdp_solution_total_dv(sol);
  std::printf("%-6s %-8s %-11s %14s %12s\n", "event", "body", "kind", "epoch_mjd2000", "dv_mps");
  const char* kinds[] = {"departure", "flyby", "rendezvous"};
  for (std::size_t i = 0; i < fdp_solution_event_count(sol); ++i) {
    fdp_event e;
    check(fdp_solution_event(sol, i, &e));
    std::printf("%-6zu %-8d %-11s %14.4f %12.3f\n", i, e.body_id, kinds[e.kind], e.epoch_mjd2000, e.dv_mps);
  }
  std::printf("total dv: %.1f m/s (%.4f km/s)\n", dv, dv / 1000.0);
  std::printf("final mass: %.1f kg\n", fdp_solution_final_mass(sol));
  std::printf("wall time: %.3f s\n", seconds);
}

void finish_solution(const Options& o, fdp_solution* sol, double seconds) {
  if (o.eps_max_kms >= 0.0) check(fdp_solution_certify(sol, o.eps_max_kms * 1000.0, 0));
  CString json;
  check(fdp_solution_to_json(sol, &json.p));
  if (o.json) {
    write_output("-", json.str() + "\n");
  } else {
    print_summary(sol, seconds);
  }
  if (!o.out.empty()) write_output(o.out, json.str() + "\n");
}

int cmd_solve(const Options& o) {
  Catalog cat;
  SequenceH seq;
  load_inputs(o, cat, &seq);
  const fdp_constraints c = constraints_of(o);
  const fdp_grid g = grid_of(o);
  SolutionH sol;
  const auto t0 = std::chrono::steady_clock::now();
  check(fdp_solve(cat.p, seq.p, &c, &g, &sol.p));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  finish_solution(o, sol.p, secs);
  return 0;
}

int cmd_refine(const Options& o) {
  Catalog cat;
  SequenceH seq;
  load_inputs(o, cat, &seq);
  const fdp_constraints c = constraints_of(o);
  const fdp_grid g = grid_of(o);
  const fdp_refine_config r{o.initial_step, o.factor, o.tube, o.final_step};
  SolutionH sol;
  const auto t0 = std::chrono::steady_clock::now();
  check(fdp_refine(cat.p, seq.p, &c, &g, &r, &sol.p));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  finish_solution(o, sol.p, secs);
  if (!o.history.empty()) {
    CString csv;
    check(fdp_solution_history_csv(sol.p, &csv.p));
    write_output(o.history, csv.str());
  }
  return 0;
}

int cmd_validate(const Options& o) {
  Catalog cat;
  check(fdp_catalog_load(o.catalog.c_str(), &cat.p));
  SequenceH seq;
  if (!o.sequence.empty()) check(fdp_sequence_load(cat.p, o.sequence.c_str(), &seq.p));
  SolutionH sol;
  check(fdp_solution_from_json(read_file(o.solution).c_str(), &sol.p));
  const fdp_constraints c = constraints_of(o);
  int ok = 0;
  CString report;
  check(fdp_validate(sol.p, cat.p, seq.p, &c, &ok, &report.p));
  write_output(o.out, report.str() + "\n");
  return ok ? 0 : kExitInput;
}

int cmd_error_stats(const Options& o) {
  Catalog cat;
  SequenceH seq;
  load_inputs(o, cat, &seq);
  const fdp_constraints c = constraints_of(o);
  fdp_rounding rounding = FDP_ROUND_WORST_CORNER;
  if (o.rounding == "nearest") rounding = FDP_ROUND_NEAREST;
  else if (o.rounding != "worst") input_error("--rounding must be 'worst' or 'nearest'");
  CString csv;
  check(fdp_error_stats(cat.p, seq.p, &c, o.steps.data(), o.steps.size(), o.samples, o.seed, rounding,
                        resolve_workers(o), &csv.p));
  write_output(o.out, csv.str());
  return 0;
}

int cmd_export_plot(const Options& o) {
  Catalog cat;
  check(fdp_catalog_load(o.catalog.c_str(), &cat.p));
  SolutionH sol;
  check(fdp_solution_from_json(read_file(o.solution).c_str(), &sol.p));
  CString csv;
  check(fdp_export_plot(sol.p, cat.p, o.sample_days, &csv.p));
  write_output(o.out, csv.str());
  return 0;
}

int cmd_convert(const Options& o) {
  std::size_t n = 0;
  check(fdp_catalog_convert(o.in.c_str(), o.from.c_str(), o.out.c_str(), &n));
  std::printf("wrote %zu bodies to %s\n", n, o.out.c_str());
  return 0;
}

void report_failure(const Failure& f) {
  nlohmann::json j;
  j["error"]["code"] = static_cast<int>(f.code);
  j["error"]["kind"] = f.code == FDP_NO_SOLUTION ? "no-solution"
                       : f.code == FDP_INPUT_ERROR ? "input"
                                                   : "internal";
  j["error"]["message"] = f.message;
  if (f.stage >= 0) j["error"]["stage"] = f.stage;
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Globally optimal impulsive multi-flyby trajectories by dynamic programming"};
  app.require_subcommand(1);
  Options o;

  auto add_inputs = [&](CLI::App* sc, bool sequence_required) {
    sc->add_option("--catalog", o.catalog, "Canonical catalog CSV")->required()->check(CLI::ExistingFile);
    auto* s = sc->add_option("--sequence", o.sequence, "Sequence JSON")->check(CLI::ExistingFile);
    if (sequence_required) s->required();
  };
  auto add_constraints = [&](CLI::App* sc) {
    sc->add_option("--v-inf-max", o.v_inf_max_kms, "Free departure excess (km/s)")->capture_default_str();
    sc->add_option("--v-flyby-max", o.v_flyby_max_kms, "Cap on relative flyby speed (km/s)");
    sc->add_option("--isp", o.isp, "Specific impulse (s)")->capture_default_str();
    sc->add_option("--m0", o.m0, "Initial mass (kg)")->capture_default_str();
    sc->add_option("--m-min", o.m_min, "Minimum final mass (kg)")->capture_default_str();
    sc->add_option("--t-max", o.t_max_days, "Maximum mission duration (days)")->capture_default_str();
  };
  auto add_grid = [&](CLI::App* sc) {
    sc->add_option("--step", o.step, "Grid step (days)")->capture_default_str();
    sc->add_option("--start", o.start, "Lattice origin / window start (MJD2000)");
    sc->add_option("--end", o.end, "Window end (MJD2000)");
    sc->add_option("--min-leg", o.min_leg, "Minimum leg duration (days)")->capture_default_str();
    sc->add_option("--max-leg", o.max_leg, "Maximum leg duration (days, 0 = none)")->capture_default_str();
    sc->add_option("--max-revs", o.max_revs, "Lambert revolution cap")->capture_default_str();
    sc->add_option("--workers", o.workers, "Worker threads (env FLYBY_DP_WORKERS)")->check(CLI::PositiveNumber);
  };
  auto add_output = [&](CLI::App* sc) {
    sc->add_option("--out", o.out, "Solution JSON output path");
    sc->add_flag("--json", o.json, "Print the solution JSON instead of the summary");
    sc->add_option("--eps-max", o.eps_max_kms, "Attach an estimated error bound N*eps_max (km/s)");
  };

  auto* solve = app.add_subcommand("solve", "Fixed-step bi-impulse DP");
  add_inputs(solve, true);
  add_constraints(solve);
  add_grid(solve);
  add_output(solve);

  auto* refine = app.add_subcommand("refine", "Adaptive step refinement");
  add_inputs(refine, true);
  add_constraints(refine);
  add_grid(refine);
  add_output(refine);
  refine->add_option("--initial-step", o.initial_step, "Initial step (days)")->capture_default_str();
  refine->add_option("--factor", o.factor, "Step reduction factor")->capture_default_str();
  refine->add_option("--tube", o.tube, "Tube half width (previous steps)")->capture_default_str();
  refine->add_option("--final-step", o.final_step, "Final step (days)")->capture_default_str();
  refine->add_option("--history", o.history, "Refinement history CSV path");

  auto* validate = app.add_subcommand("validate", "Recompute and check a solution file");
  add_inputs(validate, false);
  add_constraints(validate);
  validate->add_option("--solution", o.solution, "Solution JSON")->required()->check(CLI::ExistingFile);
  validate->add_option("--out", o.out, "Report path (default stdout)");

  auto* stats = app.add_subcommand("error-stats", "Monte-Carlo rounding error statistics");
  add_inputs(stats, true);
  add_constraints(stats);
  stats->add_option("--steps", o.steps, "Lattice steps (days)")->capture_default_str();
  stats->add_option("--samples", o.samples, "Samples per flyby event")->capture_default_str();
  stats->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  stats->add_option("--rounding", o.rounding, "worst | nearest")->capture_default_str();
  stats->add_option("--workers", o.workers, "Worker threads (env FLYBY_DP_WORKERS)")->check(CLI::PositiveNumber);
  stats->add_option("--out", o.out, "CSV path (default stdout)");

  auto* plot = app.add_subcommand("export-plot", "Sample the trajectory for plotting");
  plot->add_option("--catalog", o.catalog, "Canonical catalog CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("--solution", o.solution, "Solution JSON")->required()->check(CLI::ExistingFile);
  plot->add_option("--sample-days", o.sample_days, "Sampling interval (days)")->capture_default_str();
  plot->add_option("--out", o.out, "CSV path (default stdout)");

  auto* convert = app.add_subcommand("convert-catalog", "Convert a raw competition table to canonical CSV");
  convert->add_option("--from", o.from, "gtoc4 | gtoc11")->required()->check(CLI::IsMember({"gtoc4", "gtoc11"}));
  convert->add_option("--in", o.in, "Raw table")->required()->check(CLI::ExistingFile);
  convert->add_option("--out", o.out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_failure({FDP_INPUT_ERROR, e.what()});
    return kExitInput;
  }

  try {
    if (*solve) return cmd_solve(o);
    if (*refine) return cmd_refine(o);
    if (*validate) return cmd_validate(o);
    if (*stats) return cmd_error_stats(o);
    if (*plot) return cmd_export_plot(o);
    if (*convert) return cmd_convert(o);
  } catch (const Failure& f) {
    report_failure(f);
    return static_cast<int>(f.code);
  } catch (const std::exception& e) {
    report_failure({FDP_INTERNAL_ERROR, e.what()});
    return FDP_INTERNAL_ERROR;
  }
  return FDP_INTERNAL_ERROR;
}
