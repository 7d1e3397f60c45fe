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

/* C interface to the flyby-dp library.
 *
 * Objects are opaque handles released with their *_free function. Every call
 * that can fail returns an fdp_status; the message of the most recent failure on
 * the calling thread is available from fdp_last_error(). Strings returned through
 * char** out-parameters are owned by the caller and released with fdp_string_free.
 *
 * Units: m, m/s, kg, s; epochs in MJD2000 days.
 */
#ifndef FLYBY_DP_H
#define FLYBY_DP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(FLYBY_DP_BUILD)
#define FDP_API __declspec(dllexport)
#else
#define FDP_API __declspec(dllimport)
#endif
#else
#define FDP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fdp_status {
  FDP_OK = 0,
  FDP_NO_SOLUTION = 2,
  FDP_INPUT_ERROR = 3,
  FDP_INTERNAL_ERROR = 4
} fdp_status;

typedef enum fdp_event_kind { FDP_DEPARTURE = 0, FDP_FLYBY = 1, FDP_RENDEZVOUS = 2 } fdp_event_kind;

typedef enum fdp_rounding { FDP_ROUND_WORST_CORNER = 0, FDP_ROUND_NEAREST = 1 } fdp_rounding;

typedef struct fdp_catalog fdp_catalog;
typedef struct fdp_sequence fdp_sequence;
typedef struct fdp_solution fdp_solution;

typedef struct fdp_constraints {
  double v_inf_departure_max_mps;
  int has_v_flyby_max;
  double v_flyby_max_mps;
  double isp_s;
  double m0_kg;
  double m_min_kg;
  double t_max_s;
} fdp_constraints;

typedef struct fdp_grid {
  double step_days;
  int has_start;
  double start_mjd2000;
  int has_end;
  double end_mjd2000;
  double min_leg_days;
  double max_leg_days; /* <= 0 means unlimited */
  int max_revolutions;
  int workers;
} fdp_grid;

typedef struct fdp_refine_config {
  double initial_step_days;
  double step_factor;
  int tube_half_width;
  double final_step_days;
} fdp_refine_config;

typedef struct fdp_event {
  int body_id;
  fdp_event_kind kind;
  double epoch_mjd2000;
  double dv_mps;
  double mass_after_kg;
} fdp_event;

FDP_API const char* fdp_version(void);
FDP_API const char* fdp_last_error(void);
/* Event index of the first empty stage after FDP_NO_SOLUTION, else -1. */
FDP_API int fdp_last_error_stage(void);
FDP_API void fdp_string_free(char* s);

FDP_API void fdp_constraints_default(fdp_constraints* c);
FDP_API void fdp_grid_default(fdp_grid* g);
FDP_API void fdp_refine_default(fdp_refine_config* r);

/* Catalogs */
FDP_API fdp_status fdp_catalog_load(const char* path, fdp_catalog** out);
FDP_API fdp_status fdp_catalog_parse(const char* csv_text, fdp_catalog** out);
FDP_API size_t fdp_catalog_size(const fdp_catalog* c);
FDP_API void fdp_catalog_free(fdp_catalog* c);
FDP_API fdp_status fdp_body_state(const fdp_catalog* c, int body_id, double epoch_mjd2000,
                                  double r_m[3], double v_mps[3]);
/* format: "gtoc4" or "gtoc11" */
FDP_API fdp_status fdp_catalog_convert(const char* raw_path, const char* format,
                                       const char* out_csv_path, size_t* body_count);

/* Sequences */
FDP_API fdp_status fdp_sequence_load(const fdp_catalog* c, const char* path, fdp_sequence** out);
FDP_API fdp_status fdp_sequence_parse(const fdp_catalog* c, const char* json, fdp_sequence** out);
FDP_API size_t fdp_sequence_legs(const fdp_sequence* s);
FDP_API void fdp_sequence_free(fdp_sequence* s);

/* Solving */
FDP_API fdp_status fdp_solve(const fdp_catalog* c, const fdp_sequence* s, const fdp_constraints* k,
                             const fdp_grid* g, fdp_solution** out);
FDP_API fdp_status fdp_refine(const fdp_catalog* c, const fdp_sequence* s, const fdp_constraints* k,
                              const fdp_grid* g, const fdp_refine_config* r, fdp_solution** out);

/* Solutions */
FDP_API fdp_status fdp_solution_from_json(const char* json, fdp_solution** out);
FDP_API fdp_status fdp_solution_to_json(const fdp_solution* s, char** out);
FDP_API double fdp_solution_total_dv(const fdp_solution* s);
FDP_API double fdp_solution_final_mass(const fdp_solution* s);
FDP_API size_t fdp_solution_event_count(const fdp_solution* s);
FDP_API fdp_status fdp_solution_event(const fdp_solution* s, size_t index, fdp_event* out);
FDP_API fdp_status fdp_solution_history_csv(const fdp_solution* s, char** out);
/* Attaches N * eps_max to the solution; exact != 0 marks an enumerated eps_max. */
FDP_API fdp_status fdp_solution_certify(fdp_solution* s, double eps_max_mps, int exact);
FDP_API void fdp_solution_free(fdp_solution* s);

/* Recomputes the solution from the ephemerides. `seq` may be NULL. *ok is 1 when
 * every check passes; *report receives a JSON object with the findings. */
FDP_API fdp_status fdp_validate(const fdp_solution* sol, const fdp_catalog* c, const fdp_sequence* seq,
                                const fdp_constraints* k, int* ok, char** report);

FDP_API fdp_status fdp_export_plot(const fdp_solution* sol, const fdp_catalog* c, double sample_days,
                                   char** csv);

/* One CSV row per step: step_days,samples,mean_abs_error_mps,max_abs_error_mps */
FDP_API fdp_status fdp_error_stats(const fdp_catalog* c, const fdp_sequence* s, const fdp_constraints* k,
                                   const double* steps_days, size_t n_steps, size_t samples,
                                   uint64_t seed, fdp_rounding rounding, int workers, char** csv);

#ifdef __cplusplus
}
#endif

#endif /* FLYBY_DP_H */
