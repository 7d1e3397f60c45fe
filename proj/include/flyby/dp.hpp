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

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "flyby/catalog.hpp"
#include "flyby/legs.hpp"
#include "flyby/solution.hpp"

namespace flyby {

struct GridConfig {
  double step_days = 32.0;
  std::optional<double> start;  // lattice origin and lower clip, MJD2000; mission window start if unset
  std::optional<double> end;
  double min_leg_days = 0.0;
  double max_leg_days = std::numeric_limits<double>::infinity();
  /// Per-event window overrides (intersected with the sequence windows).
  std::vector<std::optional<TimeWindow>> stage_windows;
  /// Per-event epochs added to the lattice points (refinement pins its incumbent here).
  std::vector<std::vector<double>> pinned_epochs;
  LambertConfig lambert;
  int workers = 1;
};

/// Admissible epochs per event: origin + j * step clipped to the event window.
struct TimeGrid {
  double origin = 0.0;
  double step = 0.0;
  std::vector<std::vector<double>> epochs;

  std::size_t events() const { return epochs.size(); }
  /// ceil((end - start) / step), the lattice size of the whole mission window.
  std::size_t nominal_count(const TimeWindow& w) const;

  static TimeGrid build(const Sequence& seq, const GridConfig& config);
};

/// Ballistic arcs of leg k (event k -> k+1) for every epoch pair, row-major over
/// (departure index, arrival index). Infeasible pairs keep feasible = 0.
struct LegTable {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Vec3> v_depart;
  std::vector<Vec3> v_arrive;
  std::vector<std::uint8_t> feasible;

  std::size_t at(std::size_t i, std::size_t j) const { return i * cols + j; }
};

/// Body states at every grid epoch plus all leg tables; the Lambert memo shared
/// by every engine. Built in parallel, bitwise independent of the worker count.
struct GridEphemeris {
  std::vector<std::vector<CartesianState>> body;  // [event][epoch index]
  std::vector<LegTable> legs;                     // [leg]

  /// `leg_tables` = false fills only the body states; engines then build legs on demand.
  static GridEphemeris build(const BodyCatalog& catalog, const Sequence& seq, const TimeGrid& grid,
                             const GridConfig& config, bool leg_tables = true);
};

LegTable build_leg_table(const GridEphemeris& eph, const TimeGrid& grid, const GridConfig& config,
                         std::size_t leg);

/// Stage costs of the bi-impulse scheme expressed as a CostOracle.
class BiImpulseOracle : public CostOracle {
 public:
  BiImpulseOracle(const Sequence& seq, const MissionConstraints& constraints, const TimeGrid& grid,
                  const GridEphemeris& eph);

  LegCost transition(const OracleState& from, const OracleDecision& decision) const override;
  LegCost terminal(const OracleState& last) const override;
  Vec3 initial_velocity(int epoch_index, double epoch) const override;

 private:
  const Sequence& seq_;
  const MissionConstraints& c_;
  const TimeGrid& grid_;
  const GridEphemeris& eph_;
};

/// Event-level cost at a flyby or departure of the bi-impulse scheme.
LegCost event_cost(const Sequence& seq, const MissionConstraints& c, std::size_t event,
                   const Vec3& v_in, const Vec3& v_out, const Vec3& v_body);
/// Charge at the final event (rendezvous, or capped terminal flyby).
LegCost closing_cost(const Sequence& seq, const MissionConstraints& c, const Vec3& v_in,
                     const Vec3& v_body);

/// Exact optimum of the grid problem by time-matched DP. Ties prefer the earlier
/// previous epoch, then the earlier current epoch.
Solution solve_bi_impulse(const BodyCatalog& catalog, const Sequence& seq,
                          const MissionConstraints& constraints, const GridConfig& config);

enum class VelocityKeying {
  kPredecessorEpoch,  // one cell per (epoch, predecessor epoch): reduces to the bi-impulse engine
  kLattice,           // velocity lattice around the ballistic seed
};

struct VelocityGridConfig {
  int half_width = 0;        // bins on each side of the center, per axis
  double spacing = 100.0;    // m/s
  double max_eccentricity = 0.9;
  double max_inclination = 40.0 * constants::kDeg;
};

struct GenericConfig {
  GridConfig grid;
  VelocityKeying keying = VelocityKeying::kPredecessorEpoch;
  VelocityGridConfig velocity;
  double mass_bin_kg = std::numeric_limits<double>::infinity();
};

/// Velocity lattice for one (event, epoch): center plus offsets, bin ids dense in
/// [0, (2w+1)^3). Empty when the seed is infeasible.
struct VelocityGrid {
  std::optional<Vec3> center;
  int half_width = 0;
  double spacing = 0.0;

  std::size_t size() const;
  Vec3 velocity(std::size_t bin) const;
  std::size_t center_bin() const;
};

/// Arrival velocity of the zero-revolution arc from the previous body at the mean
/// of `previous_epochs` to body `event` at `epoch`, filtered by the e / i screen.
std::optional<Vec3> ballistic_velocity_seed(const BodyCatalog& catalog, const Sequence& seq,
                                            std::size_t event,
                                            const std::vector<double>& previous_epochs,
                                            double epoch, const VelocityGridConfig& config);

/// DP over (epoch, velocity key, mass bin) cells with minimal-total dominance.
Solution solve_generic(const BodyCatalog& catalog, const Sequence& seq,
                       const MissionConstraints& constraints, const GenericConfig& config,
                       const TimeGrid& grid, const CostOracle& oracle);

/// Same, driven by the bi-impulse oracle over the configured grid.
Solution solve_generic(const BodyCatalog& catalog, const Sequence& seq,
                       const MissionConstraints& constraints, const GenericConfig& config);

inline constexpr std::size_t kDefaultEnumerationCap = 10'000'000;

/// Exhaustive enumeration of all epoch paths; the optimality oracle for tests.
/// Tie-break matches solve_bi_impulse.
Solution brute_force_enumerate(const BodyCatalog& catalog, const Sequence& seq,
                               const MissionConstraints& constraints, const GridConfig& config,
                               std::size_t cap = kDefaultEnumerationCap);

/// Exhaustive enumeration for the generic engine (epoch and velocity-bin decisions).
Solution brute_force_enumerate(const BodyCatalog& catalog, const Sequence& seq,
                               const MissionConstraints& constraints, const GenericConfig& config,
                               const TimeGrid& grid, const CostOracle& oracle,
                               std::size_t cap = kDefaultEnumerationCap);

/// Builds the event list of an epoch path from the grid tables and checks the
/// re-derived total against `accumulated` (1e-9 relative).
Solution reconstruct(const BodyCatalog& catalog, const Sequence& seq,
                     const MissionConstraints& constraints, const TimeGrid& grid,
                     const GridEphemeris& eph, const GridConfig& config,
                     const std::vector<int>& path, double accumulated);

/// Baseline: picks each next epoch to minimize only the immediate stage cost.
Solution solve_greedy(const BodyCatalog& catalog, const Sequence& seq,
                      const MissionConstraints& constraints, const GridConfig& config);

}  // namespace flyby
