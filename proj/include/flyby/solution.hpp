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

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flyby/catalog.hpp"
#include "flyby/vec3.hpp"

namespace flyby {

/// One event of a trajectory. Velocities heliocentric, m/s; epoch MJD2000 days.
struct EventRecord {
  int body_id = 0;
  std::string body_name;
  EventKind kind = EventKind::kFlyby;
  double epoch = 0.0;
  double dv = 0.0;
  std::vector<Vec3> impulses;
  std::optional<Vec3> v_arrival;    // before the impulses; absent at departure
  std::optional<Vec3> v_departure;  // after the impulses; absent at the last event
  std::optional<Vec3> v_rel;        // relative to the body at the encounter
  double mass_after = 0.0;
};

struct RefineStep {
  double step_days = 0.0;
  double total_dv = 0.0;
  double seconds = 0.0;
};

/// J(P2) <= J(P0) + stages * eps_max. `exact` separates enumerated eps_max from a
/// Monte-Carlo estimate.
struct BoundCertificate {
  int stages = 0;
  double eps_max = 0.0;
  double solution_dv = 0.0;
  double bound = 0.0;
  bool exact = false;
  std::string statement;
};

struct Solution {
  std::vector<EventRecord> events;
  double total_dv = 0.0;
  double initial_mass = 0.0;
  double final_mass = 0.0;
  double grid_step_days = 0.0;
  std::vector<RefineStep> refinement;
  std::optional<BoundCertificate> error_bound;

  std::vector<double> epochs() const;
};

inline constexpr int kSolutionSchemaVersion = 1;

/// Versioned JSON; SI units with the unit in each key (dv_mps, epoch_mjd2000, ...).
std::string solution_to_json(const Solution& s);
Solution solution_from_json(std::string_view text);

/// Result of re-deriving a solution from the ephemerides.
struct ValidationReport {
  bool ok = true;
  std::vector<std::string> issues;
  double recomputed_dv = 0.0;
  double recomputed_final_mass = 0.0;
};

/// Recomputes every leg (Lambert between consecutive event states) and checks
/// per-event dv, totals, mass chain, windows and mission constraints.
ValidationReport validate_solution(const Solution& s, const BodyCatalog& catalog,
                                   const Sequence* sequence, const MissionConstraints& c,
                                   double tolerance = 1e-6);

/// Dense samples of the ballistic arcs between events:
/// leg,epoch_mjd2000,x_au,y_au,z_au,r_au
std::string export_plot_csv(const Solution& s, const BodyCatalog& catalog, double sample_days = 0.5);

}  // namespace flyby
