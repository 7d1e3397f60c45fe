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

#include <array>
#include <optional>

#include "flyby/catalog.hpp"
#include "flyby/lambert.hpp"
#include "flyby/vec3.hpp"

namespace flyby {

/// Result of one stage-cost query. Infeasible legs carry dv = +inf.
struct LegCost {
  double dv = 0.0;                  // m/s
  bool feasible = true;
  Vec3 v_arrival;                   // heliocentric, at leg end, before any impulse there
  std::optional<Vec3> v_departure;  // heliocentric, after the impulse at the leg start
  std::optional<Vec3> flyby_v_rel;  // spacecraft relative to the body at the event
  std::array<Vec3, 2> impulses{};   // impulse vectors applied at the event, in order
  int impulse_count = 0;

  static LegCost infeasible();
};

/// Free hyperbolic excess up to v_inf_max; only the excess beyond the cap is charged.
LegCost departure_cost(const Vec3& v_required, const Vec3& v_body, double v_inf_max);

/// Single impulse at the flyby: dv = |v_in - v_out|.
LegCost flyby_cost_unconstrained(const Vec3& v_in, const Vec3& v_out, const Vec3& v_body);

/// min over |v_f - v_body| <= v_rel_max of |v_in - v_f| + |v_f - v_out|: one impulse
/// brings the relative speed inside the cap before the encounter, a second one
/// sets up the outgoing arc. Exact to ~1e-10 m/s.
LegCost flyby_cost_constrained(const Vec3& v_in, const Vec3& v_out, const Vec3& v_body,
                               double v_rel_max);

/// Match the target body's velocity on arrival.
LegCost rendezvous_cost(const Vec3& v_arrival, const Vec3& v_body);

/// Closing flyby: zero cost unless a relative-speed cap applies.
LegCost terminal_flyby_cost(const Vec3& v_arrival, const Vec3& v_body,
                            std::optional<double> v_rel_max);

/// Rocket equation: m * exp(-dv / (g0 * isp)).
double mass_after(double m_before, double dv, double isp);

struct LambertConfig {
  int max_revolutions = 0;
  Direction direction = Direction::kPrograde;
};

/// Ballistic arc between two catalog bodies. dv is zero; v_departure / v_arrival
/// are the arc's terminal velocities. Geometry failures come back infeasible.
LegCost bi_impulse_leg(const BodyCatalog& catalog, int body_a, Epoch t_a, int body_b, Epoch t_b,
                       const LambertConfig& config = {});

/// Same, from explicit endpoint states (used by the leg tables).
LegCost bi_impulse_leg(const CartesianState& a, const CartesianState& b,
                       const LambertConfig& config = {});

/// Snapshot of a DP state handed to a cost oracle.
struct OracleState {
  int stage = 0;  // event index k
  int epoch_index = 0;
  double epoch = 0.0;  // MJD2000
  Vec3 velocity;       // heliocentric velocity arriving at event k (body velocity at k = 0)
  double mass = 0.0;
  int predecessor_epoch_index = -1;
};

/// Decision d_k: the epoch of event k+1 and, for lattice-keyed engines, the
/// velocity the spacecraft must hold on arrival.
struct OracleDecision {
  int epoch_index = 0;
  double epoch = 0.0;
  std::optional<Vec3> target_velocity;
};

/// Pluggable stage cost g~_k(s_k, d_k). Implementations must be pure and
/// deterministic; they are called concurrently.
class CostOracle {
 public:
  virtual ~CostOracle() = default;

  /// Cost of the impulses at event `from.stage` plus the transfer to event
  /// `from.stage + 1`. `v_arrival` of the result is the state velocity at the next event.
  virtual LegCost transition(const OracleState& from, const OracleDecision& decision) const = 0;

  /// Charge applied at the final event.
  virtual LegCost terminal(const OracleState& last) const;

  /// Heliocentric velocity carried by a departure state.
  virtual Vec3 initial_velocity(int epoch_index, double epoch) const;
};

}  // namespace flyby
