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

#include "flyby_dp.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include <json.hpp>

#include "flyby/catalog.hpp"
#include "flyby/dp.hpp"
#include "flyby/error_analysis.hpp"
#include "flyby/errors.hpp"
#include "flyby/refine.hpp"
#include "flyby/solution.hpp"

struct fdp_catalog {
  flyby::BodyCatalog value;
};
struct fdp_sequence {
  flyby::Sequence value;
};
struct fdp_solution {
  flyby::Solution value;
};

namespace {

thread_local std::string g_error;
thread_local int g_stage = -1;

fdp_status fail(fdp_status code, const char* what, int stage = -1) {
  g_error = what;
  g_stage = stage;
  return code;
}

template <class F>
fdp_status guarded(F&& f) {
  g_error.clear();
  g_stage = -1;
  try {
    f();
    return FDP_OK;
  } catch (const flyby::NoSolutionError& e) {
    return fail(FDP_NO_SOLUTION, e.what(), e.stage());
  } catch (const flyby::InputError& e) {
    return fail(FDP_INPUT_ERROR, e.what());
  } catch (const std::bad_alloc&) {
    return fail(FDP_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(FDP_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(FDP_INTERNAL_ERROR, "unknown failure");
  }
}

void require(const void* p, const char* name) {
  if (!p) throw flyby::InputError(std::string(name) + " must not be null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

flyby::MissionConstraints to_constraints(const fdp_constraints* k) {
  flyby::MissionConstraints c;
  if (!k) return c;
  c.v_inf_departure_max = k->v_inf_departure_max_mps;
  if (k->has_v_flyby_max) c.v_flyby_max = k->v_flyby_max_mps;
  c.isp = k->isp_s;
  c.m0 = k->m0_kg;
  c.m_min = k->m_min_kg;
  c.t_max = k->t_max_s;
  return c;
}

flyby::GridConfig to_grid(const fdp_grid* g) {
  flyby::GridConfig out;
  if (!g) return out;
  out.step_days = g->step_days;
  if (g->has_start) out.start = g->start_mjd2000;
  if (g->has_end) out.end = g->end_mjd2000;
  out.min_leg_days = g->min_leg_days;
  if (g->max_leg_days > 0.0) out.max_leg_days = g->max_leg_days;
  out.lambert.max_revolutions = g->max_revolutions;
  out.workers = g->workers;
  return out;
}

}  // namespace

extern "C" {

const char* fdp_version(void) { return "1.0.0"; }
const char* fdp_last_error(void) { return g_error.c_str(); }
int fdp_last_error_stage(void) { return g_stage; }
void fdp_string_free(char* s) { std::free(s); }

void fdp_constraints_default(fdp_constraints* c) {
  if (!c) return;
  const flyby::MissionConstraints d;
  *c = {d.v_inf_departure_max, 0, 0.0, d.isp, d.m0, d.m_min, d.t_max};
}

void fdp_grid_default(fdp_grid* g) {
  if (!g) return;
  const flyby::GridConfig d;
  *g = {d.step_days, 0, 0.0, 0, 0.0, d.min_leg_days, 0.0, d.lambert.max_revolutions, d.workers};
}

void fdp_refine_default(fdp_refine_config* r) {
  if (!r) return;
  const flyby::RefineConfig d;
  *r = {d.initial_step, d.step_factor, d.tube_half_width, d.final_step};
}

fdp_status fdp_catalog_load(const char* path, fdp_catalog** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new fdp_catalog{flyby::load_catalog(path)};
  });
}

fdp_status fdp_catalog_parse(const char* csv_text, fdp_catalog** out) {
  return guarded([&] {
    require(csv_text, "csv_text");
    require(out, "out");
    std::istringstream in{std::string(csv_text)};
    *out = new fdp_catalog{flyby::parse_catalog_csv(in)};
  });
}

size_t fdp_catalog_size(const fdp_catalog* c) { return c ? c->value.size() : 0; }
void fdp_catalog_free(fdp_catalog* c) { delete c; }

fdp_status fdp_body_state(const fdp_catalog* c, int body_id, double epoch_mjd2000, double r_m[3],
                          double v_mps[3]) {
  return guarded([&] {
    require(c, "catalog");
    require(r_m, "r_m");
    require(v_mps, "v_mps");
    const flyby::CartesianState s = c->value.state(body_id, flyby::Epoch{epoch_mjd2000});
    r_m[0] = s.r.x, r_m[1] = s.r.y, r_m[2] = s.r.z;
    v_mps[0] = s.v.x, v_mps[1] = s.v.y, v_mps[2] = s.v.z;
  });
}

fdp_status fdp_catalog_convert(const char* raw_path, const char* format, const char* out_csv_path,
                               size_t* body_count) {
  return guarded([&] {
    require(raw_path, "raw_path");
    require(format, "format");
    require(out_csv_path, "out_csv_path");
    std::ifstream in(raw_path);
    if (!in) throw flyby::InputError(std::string("cannot open ") + raw_path);
    const flyby::BodyCatalog cat = flyby::convert_raw_catalog(in, flyby::parse_raw_format(format));
    std::ofstream out(out_csv_path);
    if (!out) throw flyby::InputError(std::string("cannot write ") + out_csv_path);
    flyby::write_catalog_csv(cat, out);
    if (!out) throw flyby::InputError(std::string("write failed: ") + out_csv_path);
    if (body_count) *body_count = cat.size();
  });
}

fdp_status fdp_sequence_load(const fdp_catalog* c, const char* path, fdp_sequence** out) {
  return guarded([&] {
    require(c, "catalog");
    require(path, "path");
    require(out, "out");
    *out = new fdp_sequence{flyby::load_sequence(path, c->value)};
  });
}

fdp_status fdp_sequence_parse(const fdp_catalog* c, const char* json, fdp_sequence** out) {
  return guarded([&] {
    require(c, "catalog");
    require(json, "json");
    require(out, "out");
    *out = new fdp_sequence{flyby::parse_sequence_json(json, c->value)};
  });
}

size_t fdp_sequence_legs(const fdp_sequence* s) { return s ? s->value.legs() : 0; }
void fdp_sequence_free(fdp_sequence* s) { delete s; }

fdp_status fdp_solve(const fdp_catalog* c, const fdp_sequence* s, const fdp_constraints* k,
                     const fdp_grid* g, fdp_solution** out) {
  return guarded([&] {
    require(c, "catalog");
    require(s, "sequence");
    require(out, "out");
    *out = new fdp_solution{flyby::solve_bi_impulse(c->value, s->value, to_constraints(k), to_grid(g))};
  });
}

fdp_status fdp_refine(const fdp_catalog* c, const fdp_sequence* s, const fdp_constraints* k,
                      const fdp_grid* g, const fdp_refine_config* r, fdp_solution** out) {
  return guarded([&] {
    require(c, "catalog");
    require(s, "sequence");
    require(out, "out");
    flyby::RefineConfig cfg;
    if (r) cfg = {r->initial_step_days, r->step_factor, r->tube_half_width, r->final_step_days};
    *out = new fdp_solution{flyby::refine(c->value, s->value, to_constraints(k), to_grid(g), cfg)};
  });
}

fdp_status fdp_solution_from_json(const char* json, fdp_solution** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    *out = new fdp_solution{flyby::solution_from_json(json)};
  });
}

fdp_status fdp_solution_to_json(const fdp_solution* s, char** out) {
  return guarded([&] {
    require(s, "solution");
    require(out, "out");
    *out = dup_string(flyby::solution_to_json(s->value));
  });
}

double fdp_solution_total_dv(const fdp_solution* s) {
  return s ? s->value.total_dv : std::numeric_limits<double>::quiet_NaN();
}
double fdp_solution_final_mass(const fdp_solution* s) {
  return s ? s->value.final_mass : std::numeric_limits<double>::quiet_NaN();
}
size_t fdp_solution_event_count(const fdp_solution* s) { return s ? s->value.events.size() : 0; }

fdp_status fdp_solution_event(const fdp_solution* s, size_t index, fdp_event* out) {
  return guarded([&] {
    require(s, "solution");
    require(out, "out");
    if (index >= s->value.events.size()) throw flyby::InputError("event index out of range");
    const auto& e = s->value.events[index];
    out->body_id = e.body_id;
    out->kind = static_cast<fdp_event_kind>(e.kind);
    out->epoch_mjd2000 = e.epoch;
    out->dv_mps = e.dv;
    out->mass_after_kg = e.mass_after;
  });
}

fdp_status fdp_solution_history_csv(const fdp_solution* s, char** out) {
  return guarded([&] {
    require(s, "solution");
    require(out, "out");
    *out = dup_string(flyby::refine_history_csv(s->value.refinement));
  });
}

fdp_status fdp_solution_certify(fdp_solution* s, double eps_max_mps, int exact) {
  return guarded([&] {
    require(s, "solution");
    s->value.error_bound = flyby::certify_bound(s->value, eps_max_mps, exact != 0);
  });
}

void fdp_solution_free(fdp_solution* s) { delete s; }

fdp_status fdp_validate(const fdp_solution* sol, const fdp_catalog* c, const fdp_sequence* seq,
                        const fdp_constraints* k, int* ok, char** report) {
  return guarded([&] {
    require(sol, "solution");
    require(c, "catalog");
    const flyby::ValidationReport r = flyby::validate_solution(
        sol->value, c->value, seq ? &seq->value : nullptr, to_constraints(k));
    if (ok) *ok = r.ok ? 1 : 0;
    if (report) {
      nlohmann::json j;
      j["ok"] = r.ok;
      j["issues"] = r.issues;
      j["recomputed_total_dv_mps"] = r.recomputed_dv;
      j["recomputed_final_mass_kg"] = r.recomputed_final_mass;
      *report = dup_string(j.dump(2));
    }
  });
}

fdp_status fdp_export_plot(const fdp_solution* sol, const fdp_catalog* c, double sample_days, char** csv) {
  return guarded([&] {
    require(sol, "solution");
    require(c, "catalog");
    require(csv, "csv");
    *csv = dup_string(flyby::export_plot_csv(sol->value, c->value, sample_days));
  });
}

fdp_status fdp_error_stats(const fdp_catalog* c, const fdp_sequence* s, const fdp_constraints* k,
                           const double* steps_days, size_t n_steps, size_t samples, uint64_t seed,
                           fdp_rounding rounding, int workers, char** csv) {
  return guarded([&] {
    require(c, "catalog");
    require(s, "sequence");
    require(csv, "csv");
    if (n_steps > 0) require(steps_days, "steps_days");
    flyby::ErrorStatsConfig cfg;
    cfg.rounding = rounding == FDP_ROUND_NEAREST ? flyby::RoundingMode::kNearest
                                                 : flyby::RoundingMode::kWorstCorner;
    cfg.workers = workers;
    std::vector<flyby::ErrorReport> reports;
    for (size_t i = 0; i < n_steps; ++i) {
      reports.push_back(
          flyby::leg_error_stats(c->value, s->value, to_constraints(k), steps_days[i], samples, seed, cfg));
    }
    *csv = dup_string(flyby::error_reports_csv(reports));
  });
}

}  // extern "C"
