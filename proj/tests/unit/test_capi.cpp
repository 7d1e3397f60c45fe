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

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>

#include "flyby_dp.h"
#include "support/fixture.hpp"

using flyby::testing::kFixtureCatalog;
using flyby::testing::kFixtureSequence;

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  fdp_string_free(s);
  return out;
}

struct Loaded {
  fdp_catalog* cat = nullptr;
  fdp_sequence* seq = nullptr;
  Loaded() {
    REQUIRE(fdp_catalog_parse(kFixtureCatalog, &cat) == FDP_OK);
    REQUIRE(fdp_sequence_parse(cat, kFixtureSequence, &seq) == FDP_OK);
  }
  ~Loaded() {
    fdp_sequence_free(seq);
    fdp_catalog_free(cat);
  }
};

fdp_grid grid(double step) {
  fdp_grid g;
  fdp_grid_default(&g);
  g.step_days = step;
  return g;
}

}  // namespace

TEST_CASE("defaults and version") {
  CHECK(std::strcmp(fdp_version(), "1.0.0") == 0);
  fdp_constraints c;
  fdp_constraints_default(&c);
  CHECK(c.v_inf_departure_max_mps == 4000.0);
  CHECK(c.isp_s == 3000.0);
  CHECK(c.m0_kg == 1500.0);
  CHECK(c.has_v_flyby_max == 0);
  fdp_refine_config r;
  fdp_refine_default(&r);
  CHECK(r.step_factor == 2.0);
  CHECK(r.tube_half_width == 2);
}

TEST_CASE("solve, inspect and round-trip a solution") {
  Loaded in;
  CHECK(fdp_catalog_size(in.cat) == 4);
  CHECK(fdp_sequence_legs(in.seq) == 3);
  fdp_constraints k;
  fdp_constraints_default(&k);
  k.m_min_kg = 0.0;
  k.t_max_s = 1e12;
  const fdp_grid g = grid(25.0);
  fdp_solution* sol = nullptr;
  REQUIRE(fdp_solve(in.cat, in.seq, &k, &g, &sol) == FDP_OK);
  CHECK(std::strlen(fdp_last_error()) == 0);
  const double dv = fdp_solution_total_dv(sol);
  CHECK(std::isfinite(dv));
  CHECK(dv >= 0.0);
  CHECK(fdp_solution_final_mass(sol) == doctest::Approx(1500.0 * std::exp(-dv / (9.80665 * 3000.0))));
  REQUIRE(fdp_solution_event_count(sol) == 4);
  fdp_event e;
  REQUIRE(fdp_solution_event(sol, 0, &e) == FDP_OK);
  CHECK(e.kind == FDP_DEPARTURE);
  CHECK(e.body_id == 0);
  REQUIRE(fdp_solution_event(sol, 3, &e) == FDP_OK);
  CHECK(e.kind == FDP_RENDEZVOUS);
  CHECK(e.epoch_mjd2000 >= 3550.0);
  CHECK(fdp_solution_event(sol, 4, &e) == FDP_INPUT_ERROR);

  char* text = nullptr;
  REQUIRE(fdp_solution_to_json(sol, &text) == FDP_OK);
  const std::string json = take(text);
  fdp_solution* back = nullptr;
  REQUIRE(fdp_solution_from_json(json.c_str(), &back) == FDP_OK);
  REQUIRE(fdp_solution_to_json(back, &text) == FDP_OK);
  CHECK(take(text) == json);

  int ok = 0;
  char* report = nullptr;
  REQUIRE(fdp_validate(back, in.cat, in.seq, &k, &ok, &report) == FDP_OK);
  const std::string rep = take(report);
  CHECK(rep.find("\"ok\"") != std::string::npos);
  CHECK(ok == 1);

  char* csv = nullptr;
  REQUIRE(fdp_export_plot(sol, in.cat, 5.0, &csv) == FDP_OK);
  CHECK(take(csv).rfind("leg,epoch_mjd2000,x_au,y_au,z_au,r_au\n", 0) == 0);

  REQUIRE(fdp_solution_certify(back, 2.5, 0) == FDP_OK);
  REQUIRE(fdp_solution_to_json(back, &text) == FDP_OK);
  CHECK(take(text).find("error_bound") != std::string::npos);

  fdp_solution_free(back);
  fdp_solution_free(sol);
}

TEST_CASE("refine through the C interface") {
  Loaded in;
  const fdp_grid g = grid(32.0);
  fdp_refine_config r;
  fdp_refine_default(&r);
  r.initial_step_days = 32.0;
  r.final_step_days = 1.0;
  fdp_solution* coarse = nullptr;
  fdp_solution* fine = nullptr;
  REQUIRE(fdp_solve(in.cat, in.seq, nullptr, &g, &coarse) == FDP_OK);
  REQUIRE(fdp_refine(in.cat, in.seq, nullptr, &g, &r, &fine) == FDP_OK);
  CHECK(fdp_solution_total_dv(fine) <= fdp_solution_total_dv(coarse));
  char* csv = nullptr;
  REQUIRE(fdp_solution_history_csv(fine, &csv) == FDP_OK);
  const std::string history = take(csv);
  CHECK(history.rfind("step_days,total_dv_mps,seconds\n32,", 0) == 0);
  fdp_solution_free(coarse);
  fdp_solution_free(fine);
}

TEST_CASE("error statistics through the C interface") {
  Loaded in;
  const double steps[] = {1.0, 0.1};
  char* csv = nullptr;
  REQUIRE(fdp_error_stats(in.cat, in.seq, nullptr, steps, 2, 50, 11, FDP_ROUND_WORST_CORNER, 2, &csv) == FDP_OK);
  const std::string text = take(csv);
  CHECK(text.rfind("step_days,samples,mean_abs_error_mps,max_abs_error_mps\n1,100,", 0) == 0);
  CHECK(text.find("\n0.1,100,") != std::string::npos);
}

TEST_CASE("status codes and error messages") {
  fdp_catalog* cat = nullptr;
  CHECK(fdp_catalog_parse("id,name,epoch_mjd,a_au,e,i_deg,raan_deg,argp_deg,m0_deg\n0,X,54000,1,1.2,0,0,0,0\n",
                          &cat) == FDP_INPUT_ERROR);
  CHECK(std::string(fdp_last_error()).find("eccentricity out of range, line 2") != std::string::npos);
  CHECK(fdp_catalog_parse(nullptr, &cat) == FDP_INPUT_ERROR);
  CHECK(fdp_catalog_load("/nonexistent.csv", &cat) == FDP_INPUT_ERROR);
  CHECK(fdp_solution_from_json("{}", nullptr) == FDP_INPUT_ERROR);
  fdp_solution* sol = nullptr;
  CHECK(fdp_solution_from_json("not json", &sol) == FDP_INPUT_ERROR);
  CHECK(sol == nullptr);
  CHECK(std::isnan(fdp_solution_total_dv(nullptr)));

  Loaded in;
  fdp_grid g = grid(25.0);
  g.has_end = 1;
  g.end_mjd2000 = 3500.0;  // the rendezvous window starts after this
  CHECK(fdp_solve(in.cat, in.seq, nullptr, &g, &sol) == FDP_NO_SOLUTION);
  CHECK(fdp_last_error_stage() == 3);
  CHECK(std::string(fdp_last_error()).find("event 3") != std::string::npos);

  g = grid(-1.0);
  CHECK(fdp_solve(in.cat, in.seq, nullptr, &g, &sol) == FDP_INPUT_ERROR);
  CHECK(fdp_last_error_stage() == -1);

  fdp_sequence* seq = nullptr;
  CHECK(fdp_sequence_parse(in.cat, R"({"mission_window": [1, 2], "entries": [{"body": "Nobody", "kind": "departure"}, {"body": 1, "kind": "flyby"}]})",
                           &seq) == FDP_INPUT_ERROR);
  CHECK(fdp_body_state(in.cat, 99, 3000.0, nullptr, nullptr) == FDP_INPUT_ERROR);
  double r[3], v[3];
  CHECK(fdp_body_state(in.cat, 99, 3000.0, r, v) == FDP_INPUT_ERROR);
  REQUIRE(fdp_body_state(in.cat, 0, 3000.0, r, v) == FDP_OK);
  CHECK(std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]) == doctest::Approx(1.496e11).epsilon(0.02));
}
