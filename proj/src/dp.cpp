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

#include "flyby/dp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <tuple>

#include "flyby/errors.hpp"
#include "flyby/parallel.hpp"

namespace flyby {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEpochSlack = 1e-9;  // days
constexpr std::size_t kMaxEpochsPerEvent = 50'000'000;

void check_grid_config(const GridConfig& config) {
  if (!(config.step_days > 0.0) || !std::isfinite(config.step_days)) {
    throw InputError("grid step must be positive and finite");
  }
  if (!(config.min_leg_days >= 0.0)) throw InputError("min_leg_days must be non-negative");
  if (!(config.max_leg_days > config.min_leg_days)) {
    throw InputError("max_leg_days must exceed min_leg_days");
  }
  if (config.lambert.max_revolutions < 0) throw InputError("max_revolutions must be >= 0");
}

bool leg_duration_ok(const GridConfig& config, double days) {
  return days > 0.0 && days >= config.min_leg_days && days <= config.max_leg_days;
}

void require_nonempty(const TimeGrid& grid) {
  for (std::size_t k = 0; k < grid.events(); ++k) {
    if (grid.epochs[k].empty()) {
      throw NoSolutionError("no admissible epochs at event " + std::to_string(k), static_cast<int>(k));
    }
  }
}

void check_inputs(const Sequence& seq, const MissionConstraints& c) {
  validate_sequence(seq);
  validate_constraints(c);
}

double product_count(const TimeGrid& grid) {
  double n = 1.0;
  for (const auto& e : grid.epochs) n *= static_cast<double>(e.size());
  return n;
}

EventRecord make_record(const BodyCatalog& catalog, const Sequence& seq, std::size_t k, double epoch,
                        const LegCost& cost) {
  EventRecord r;
  r.body_id = seq.entries[k].body_id;
  r.body_name = catalog.at(r.body_id).name;
  r.kind = seq.entries[k].kind;
  r.epoch = epoch;
  r.dv = cost.dv;
  for (int i = 0; i < cost.impulse_count; ++i) r.impulses.push_back(cost.impulses[i]);
  r.v_rel = cost.flyby_v_rel;
  return r;
}

void check_accumulator(double derived, double accumulated) {
  if (!(std::abs(derived - accumulated) <= 1e-9 * std::max(1.0, std::abs(accumulated)))) {
    throw InternalError("reconstructed total " + std::to_string(derived) +
                        " disagrees with the DP accumulator " + std::to_string(accumulated));
  }
}

}  // namespace

std::size_t TimeGrid::nominal_count(const TimeWindow& w) const {
  return static_cast<std::size_t>(std::ceil((w.hi - w.lo) / step));
}

TimeGrid TimeGrid::build(const Sequence& seq, const GridConfig& config) {
  check_grid_config(config);
  validate_sequence(seq);
  TimeGrid g;
  g.origin = config.start.value_or(seq.mission_window.lo);
  g.step = config.step_days;
  const double end = config.end.value_or(seq.mission_window.hi);
  if (!std::isfinite(g.origin) || !std::isfinite(end)) throw InputError("grid bounds must be finite");

  g.epochs.resize(seq.entries.size());
  for (std::size_t k = 0; k < seq.entries.size(); ++k) {
    TimeWindow w = seq.window(k);
    w.lo = std::max(w.lo, g.origin);
    w.hi = std::min(w.hi, end);
    if (k < config.stage_windows.size() && config.stage_windows[k]) {
      w.lo = std::max(w.lo, config.stage_windows[k]->lo);
      w.hi = std::min(w.hi, config.stage_windows[k]->hi);
    }
    auto& out = g.epochs[k];
    if (w.hi >= w.lo) {
      const double j_lo = std::ceil((w.lo - g.origin) / g.step - kEpochSlack);
      const double j_hi = std::floor((w.hi - g.origin) / g.step + kEpochSlack);
      if (j_hi - j_lo + 1.0 > static_cast<double>(kMaxEpochsPerEvent)) {
        throw InputError("grid too fine: event " + std::to_string(k) + " would hold " +
                         std::to_string(j_hi - j_lo + 1.0) + " epochs");
      }
      for (double j = j_lo; j <= j_hi; j += 1.0) {
        const double t = g.origin + j * g.step;
        if (t >= w.lo - kEpochSlack && t <= w.hi + kEpochSlack) out.push_back(t);
      }
      if (k < config.pinned_epochs.size()) {
        for (double t : config.pinned_epochs[k]) {
          if (t >= w.lo - kEpochSlack && t <= w.hi + kEpochSlack) out.push_back(t);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
      }
    }
  }
  return g;
}

GridEphemeris GridEphemeris::build(const BodyCatalog& catalog, const Sequence& seq,
                                   const TimeGrid& grid, const GridConfig& config, bool leg_tables) {
  GridEphemeris eph;
  eph.body.resize(grid.events());
  for (std::size_t k = 0; k < grid.events(); ++k) {
    const int id = seq.entries[k].body_id;
    const auto& ts = grid.epochs[k];
    eph.body[k].resize(ts.size());
    parallel_for(ts.size(), config.workers,
                 [&](std::size_t i) { eph.body[k][i] = catalog.state(id, Epoch{ts[i]}); });
  }
  if (leg_tables) {
    for (std::size_t k = 0; k + 1 < grid.events(); ++k) {
      eph.legs.push_back(build_leg_table(eph, grid, config, k));
    }
  }
  return eph;
}

LegTable build_leg_table(const GridEphemeris& eph, const TimeGrid& grid, const GridConfig& config,
                         std::size_t leg) {
  LegTable t;
  t.rows = grid.epochs[leg].size();
  t.cols = grid.epochs[leg + 1].size();
  t.v_depart.assign(t.rows * t.cols, Vec3{});
  t.v_arrive.assign(t.rows * t.cols, Vec3{});
  t.feasible.assign(t.rows * t.cols, 0);
  parallel_for(t.rows, config.workers, [&](std::size_t i) {
    const double ti = grid.epochs[leg][i];
    for (std::size_t j = 0; j < t.cols; ++j) {
      if (!leg_duration_ok(config, grid.epochs[leg + 1][j] - ti)) continue;
      const LegCost arc = bi_impulse_leg(eph.body[leg][i], eph.body[leg + 1][j], config.lambert);
      if (!arc.feasible) continue;
      const std::size_t idx = t.at(i, j);
      t.v_depart[idx] = *arc.v_departure;
      t.v_arrive[idx] = arc.v_arrival;
      t.feasible[idx] = 1;
    }
  });
  return t;
}

LegCost event_cost(const Sequence& seq, const MissionConstraints& c, std::size_t event,
                   const Vec3& v_in, const Vec3& v_out, const Vec3& v_body) {
  (void)seq;
  if (event == 0) return departure_cost(v_out, v_body, c.v_inf_departure_max);
  if (c.v_flyby_max) return flyby_cost_constrained(v_in, v_out, v_body, *c.v_flyby_max);
  return flyby_cost_unconstrained(v_in, v_out, v_body);
}

LegCost closing_cost(const Sequence& seq, const MissionConstraints& c, const Vec3& v_in,
                     const Vec3& v_body) {
  if (seq.entries.back().kind == EventKind::kRendezvous) return rendezvous_cost(v_in, v_body);
  return terminal_flyby_cost(v_in, v_body, c.v_flyby_max);
}

// ---------------------------------------------------------------------------
// Bi-impulse oracle

BiImpulseOracle::BiImpulseOracle(const Sequence& seq, const MissionConstraints& constraints,
                                 const TimeGrid& grid, const GridEphemeris& eph)
    : seq_(seq), c_(constraints), grid_(grid), eph_(eph) {
  if (eph_.legs.size() + 1 != grid_.events()) {
    throw InputError("bi-impulse oracle needs precomputed leg tables");
  }
}

LegCost BiImpulseOracle::transition(const OracleState& from, const OracleDecision& d) const {
  const auto k = static_cast<std::size_t>(from.stage);
  const LegTable& leg = eph_.legs.at(k);
  const std::size_t idx = leg.at(static_cast<std::size_t>(from.epoch_index),
                                 static_cast<std::size_t>(d.epoch_index));
  if (!leg.feasible[idx]) return LegCost::infeasible();
  LegCost c = event_cost(seq_, c_, k, from.velocity, leg.v_depart[idx],
                         eph_.body[k][static_cast<std::size_t>(from.epoch_index)].v);
  c.v_arrival = leg.v_arrive[idx];
  return c;
}

LegCost BiImpulseOracle::terminal(const OracleState& last) const {
  const auto k = static_cast<std::size_t>(last.stage);
  return closing_cost(seq_, c_, last.velocity,
                      eph_.body[k][static_cast<std::size_t>(last.epoch_index)].v);
}

Vec3 BiImpulseOracle::initial_velocity(int epoch_index, double) const {
  return eph_.body[0][static_cast<std::size_t>(epoch_index)].v;
}

// ---------------------------------------------------------------------------
// Reconstruction

Solution reconstruct(const BodyCatalog& catalog, const Sequence& seq,
                     const MissionConstraints& constraints, const TimeGrid& grid,
                     const GridEphemeris& eph, const GridConfig& config,
                     const std::vector<int>& path, double accumulated) {
  const std::size_t n_events = seq.entries.size();
  if (path.size() != n_events) throw InternalError("back-pointer chain has the wrong length");
  for (std::size_t k = 0; k < n_events; ++k) {
    if (path[k] < 0 || static_cast<std::size_t>(path[k]) >= grid.epochs[k].size()) {
      throw InternalError("broken back-pointer at event " + std::to_string(k));
    }
  }
  auto state = [&](std::size_t k) -> const CartesianState& {
    return eph.body[k][static_cast<std::size_t>(path[k])];
  };

  std::vector<LegCost> arcs;
  for (std::size_t k = 0; k + 1 < n_events; ++k) {
    if (!leg_duration_ok(config, grid.epochs[k + 1][static_cast<std::size_t>(path[k + 1])] -
                                     grid.epochs[k][static_cast<std::size_t>(path[k])])) {
      throw InternalError("reconstructed path violates the leg duration limits");
    }
    arcs.push_back(bi_impulse_leg(state(k), state(k + 1), config.lambert));
    if (!arcs.back().feasible) throw InternalError("reconstructed path contains an infeasible leg");
  }

  Solution sol;
  sol.initial_mass = constraints.m0;
  sol.grid_step_days = grid.step;
  double mass = constraints.m0;
  double total = 0.0;
  for (std::size_t k = 0; k < n_events; ++k) {
    const double t = grid.epochs[k][static_cast<std::size_t>(path[k])];
    const LegCost cost =
        (k + 1 < n_events)
            ? event_cost(seq, constraints, k, k == 0 ? Vec3{} : arcs[k - 1].v_arrival,
                         *arcs[k].v_departure, state(k).v)
            : closing_cost(seq, constraints, arcs[k - 1].v_arrival, state(k).v);
    EventRecord r = make_record(catalog, seq, k, t, cost);
    if (k > 0) r.v_arrival = arcs[k - 1].v_arrival;
    if (k + 1 < n_events) r.v_departure = arcs[k].v_departure;
    total += cost.dv;
    mass = mass_after(mass, cost.dv, constraints.isp);
    r.mass_after = mass;
    sol.events.push_back(std::move(r));
  }
  check_accumulator(total, accumulated);
  sol.total_dv = total;
  sol.final_mass = mass;
  return sol;
}

// ---------------------------------------------------------------------------
// Bi-impulse DP

Solution solve_bi_impulse(const BodyCatalog& catalog, const Sequence& seq,
                          const MissionConstraints& constraints, const GridConfig& config) {
  check_inputs(seq, constraints);
  const TimeGrid grid = TimeGrid::build(seq, config);
  require_nonempty(grid);
  const GridEphemeris eph = GridEphemeris::build(catalog, seq, grid, config, false);
  const std::size_t n_legs = seq.legs();

  // S[i * n_k + j]: best total through event k-1 at epoch i and event k at epoch j,
  // charges of events 0..k-1 included.
  LegTable prev = build_leg_table(eph, grid, config, 0);
  std::vector<double> S(prev.rows * prev.cols, kInf);
  parallel_for(prev.rows, config.workers, [&](std::size_t i) {
    for (std::size_t j = 0; j < prev.cols; ++j) {
      const std::size_t idx = prev.at(i, j);
      if (!prev.feasible[idx]) continue;
      S[idx] = event_cost(seq, constraints, 0, Vec3{}, prev.v_depart[idx], eph.body[0][i].v).dv;
    }
  });
  auto all_infinite = [](const std::vector<double>& v) {
    return std::none_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (all_infinite(S)) throw NoSolutionError("no feasible leg into event 1", 1);

  // back[k][j * n_k + l] = epoch index of event k-2 (k >= 2).
  std::vector<std::vector<std::int32_t>> back(n_legs + 1);
  for (std::size_t k = 1; k < n_legs; ++k) {
    LegTable next = build_leg_table(eph, grid, config, k);
    const std::size_t n_prev = prev.rows;
    const std::size_t n_mid = next.rows;
    const std::size_t n_next = next.cols;
    std::vector<double> S_next(n_mid * n_next, kInf);
    std::vector<std::int32_t> bp(n_mid * n_next, -1);
    parallel_for(n_mid, config.workers, [&](std::size_t j) {
      std::vector<std::size_t> preds;
      for (std::size_t i = 0; i < n_prev; ++i) {
        if (std::isfinite(S[prev.at(i, j)])) preds.push_back(i);
      }
      if (preds.empty()) return;
      const Vec3 v_body = eph.body[k][j].v;
      for (std::size_t l = 0; l < n_next; ++l) {
        const std::size_t out = next.at(j, l);
        if (!next.feasible[out]) continue;
        const Vec3 v_out = next.v_depart[out];
        double best = kInf;
        std::int32_t arg = -1;
        for (std::size_t i : preds) {
          const std::size_t in = prev.at(i, j);
          const double c =
              S[in] + event_cost(seq, constraints, k, prev.v_arrive[in], v_out, v_body).dv;
          if (c < best) {
            best = c;
            arg = static_cast<std::int32_t>(i);
          }
        }
        S_next[out] = best;
        bp[out] = arg;
      }
    });
    if (all_infinite(S_next)) {
      throw NoSolutionError("no feasible path reaches event " + std::to_string(k + 1),
                            static_cast<int>(k + 1));
    }
    S = std::move(S_next);
    back[k + 1] = std::move(bp);
    prev = std::move(next);
  }

  double best = kInf;
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < prev.rows; ++i) {
    for (std::size_t j = 0; j < prev.cols; ++j) {
      const std::size_t idx = prev.at(i, j);
      if (!std::isfinite(S[idx])) continue;
      const double total =
          S[idx] + closing_cost(seq, constraints, prev.v_arrive[idx], eph.body[n_legs][j].v).dv;
      if (total < best) {
        best = total;
        bi = i;
        bj = j;
      }
    }
  }
  if (!std::isfinite(best)) {
    throw NoSolutionError("no feasible closing at event " + std::to_string(n_legs),
                          static_cast<int>(n_legs));
  }

  std::vector<int> path(n_legs + 1, -1);
  path[n_legs - 1] = static_cast<int>(bi);
  path[n_legs] = static_cast<int>(bj);
  for (std::size_t k = n_legs; k >= 2; --k) {
    const std::size_t n_k = grid.epochs[k].size();
    const auto idx = static_cast<std::size_t>(path[k - 1]) * n_k + static_cast<std::size_t>(path[k]);
    path[k - 2] = back[k].at(idx);
    if (path[k - 2] < 0) throw InternalError("broken back-pointer at event " + std::to_string(k - 2));
  }
  return reconstruct(catalog, seq, constraints, grid, eph, config, path, best);
}

// ---------------------------------------------------------------------------
// Velocity lattice

std::size_t VelocityGrid::size() const {
  if (!center) return 0;
  const auto side = static_cast<std::size_t>(2 * half_width + 1);
  return side * side * side;
}

Vec3 VelocityGrid::velocity(std::size_t bin) const {
  const auto side = static_cast<std::size_t>(2 * half_width + 1);
  const double ix = static_cast<double>(bin / (side * side)) - half_width;
  const double iy = static_cast<double>((bin / side) % side) - half_width;
  const double iz = static_cast<double>(bin % side) - half_width;
  return *center + Vec3{ix, iy, iz} * spacing;
}

std::size_t VelocityGrid::center_bin() const {
  const auto side = static_cast<std::size_t>(2 * half_width + 1);
  const auto h = static_cast<std::size_t>(half_width);
  return (h * side + h) * side + h;
}

namespace {

// Bin of `v` in the lattice, or nothing when it falls outside.
std::optional<std::size_t> bin_of(const VelocityGrid& g, const Vec3& v) {
  if (!g.center) return std::nullopt;
  const Vec3 d = (v - *g.center) / g.spacing;
  const double c[3] = {std::round(d.x), std::round(d.y), std::round(d.z)};
  const auto side = static_cast<std::size_t>(2 * g.half_width + 1);
  std::size_t bin = 0;
  for (double x : c) {
    if (!(std::abs(x) <= g.half_width)) return std::nullopt;
    bin = bin * side + static_cast<std::size_t>(x + g.half_width);
  }
  return bin;
}

}  // namespace

std::optional<Vec3> ballistic_velocity_seed(const BodyCatalog& catalog, const Sequence& seq,
                                            std::size_t event,
                                            const std::vector<double>& previous_epochs,
                                            double epoch, const VelocityGridConfig& config) {
  if (event == 0 || event >= seq.entries.size()) throw InputError("seed needs an event index >= 1");
  if (previous_epochs.empty()) throw InputError("seed needs a nonempty previous layer");
  const double mean = std::accumulate(previous_epochs.begin(), previous_epochs.end(), 0.0) /
                      static_cast<double>(previous_epochs.size());
  if (!(epoch > mean)) return std::nullopt;
  const int to = seq.entries[event].body_id;
  const LegCost arc =
      bi_impulse_leg(catalog, seq.entries[event - 1].body_id, Epoch{mean}, to, Epoch{epoch});
  if (!arc.feasible) return std::nullopt;
  const Vec3 r = catalog.state(to, Epoch{epoch}).r;
  if (!(eccentricity(r, arc.v_arrival) < config.max_eccentricity)) return std::nullopt;
  if (!(inclination(r, arc.v_arrival) < config.max_inclination)) return std::nullopt;
  return arc.v_arrival;
}

// ---------------------------------------------------------------------------
// Generic engine

namespace {

struct Cell {
  int epoch = 0;
  std::int64_t vkey = 0;
  std::int64_t mbin = 0;
  Vec3 velocity;
  double mass = 0.0;
  double total = 0.0;
  int pred = -1;
  LegCost via;  // transition that produced this cell
};

std::int64_t mass_bin(double m0, double mass, double width) {
  if (!std::isfinite(width)) return 0;
  return static_cast<std::int64_t>(std::floor((m0 - mass) / width));
}

OracleState oracle_state(std::size_t stage, const Cell& c, const std::vector<Cell>* prev) {
  OracleState s;
  s.stage = static_cast<int>(stage);
  s.epoch_index = c.epoch;
  s.velocity = c.velocity;
  s.mass = c.mass;
  s.predecessor_epoch_index = (prev && c.pred >= 0) ? (*prev)[static_cast<std::size_t>(c.pred)].epoch : -1;
  return s;
}

void check_generic_config(const GenericConfig& config) {
  check_grid_config(config.grid);
  if (config.keying == VelocityKeying::kLattice) {
    if (config.velocity.half_width < 0) throw InputError("velocity half width must be >= 0");
    if (!(config.velocity.spacing > 0.0)) throw InputError("velocity spacing must be positive");
  }
  if (!(config.mass_bin_kg > 0.0)) throw InputError("mass bin width must be positive");
}

std::vector<VelocityGrid> lattice_for(const BodyCatalog& catalog, const Sequence& seq,
                                      const GenericConfig& config, const TimeGrid& grid,
                                      std::size_t event, const std::vector<double>& prev_layer) {
  std::vector<VelocityGrid> out(grid.epochs[event].size());
  parallel_for(out.size(), config.grid.workers, [&](std::size_t l) {
    out[l].half_width = config.velocity.half_width;
    out[l].spacing = config.velocity.spacing;
    out[l].center = ballistic_velocity_seed(catalog, seq, event, prev_layer, grid.epochs[event][l],
                                            config.velocity);
  });
  return out;
}

Solution assemble(const BodyCatalog& catalog, const Sequence& seq, const MissionConstraints& c,
                  const TimeGrid& grid, const std::vector<const Cell*>& chain, const LegCost& closing,
                  double accumulated) {
  const std::size_t n_events = chain.size();
  Solution sol;
  sol.initial_mass = c.m0;
  sol.grid_step_days = grid.step;
  double total = 0.0;
  double mass = c.m0;
  for (std::size_t k = 0; k < n_events; ++k) {
    const Cell& here = *chain[k];
    const LegCost& cost = (k + 1 < n_events) ? chain[k + 1]->via : closing;
    EventRecord r =
        make_record(catalog, seq, k, grid.epochs[k][static_cast<std::size_t>(here.epoch)], cost);
    if (k > 0) r.v_arrival = here.velocity;
    if (k + 1 < n_events) r.v_departure = cost.v_departure;
    total += cost.dv;
    mass = (k + 1 < n_events) ? chain[k + 1]->mass : mass_after(here.mass, cost.dv, c.isp);
    r.mass_after = mass;
    sol.events.push_back(std::move(r));
  }
  check_accumulator(total, accumulated);
  sol.total_dv = total;
  sol.final_mass = mass;
  return sol;
}

}  // namespace

Solution solve_generic(const BodyCatalog& catalog, const Sequence& seq,
                       const MissionConstraints& constraints, const GenericConfig& config,
                       const TimeGrid& grid, const CostOracle& oracle) {
  check_inputs(seq, constraints);
  check_generic_config(config);
  if (grid.events() != seq.entries.size()) throw InputError("grid does not match the sequence");
  require_nonempty(grid);
  const std::size_t n_events = seq.entries.size();
  const bool lattice = config.keying == VelocityKeying::kLattice;

  std::vector<std::vector<Cell>> layers(n_events);
  for (std::size_t i = 0; i < grid.epochs[0].size(); ++i) {
    Cell c;
    c.epoch = static_cast<int>(i);
    c.velocity = oracle.initial_velocity(c.epoch, grid.epochs[0][i]);
    c.mass = constraints.m0;
    layers[0].push_back(c);
  }

  for (std::size_t k = 0; k + 1 < n_events; ++k) {
    const std::vector<Cell>& cur = layers[k];
    const std::vector<Cell>* before = k > 0 ? &layers[k - 1] : nullptr;
    const auto& next_epochs = grid.epochs[k + 1];

    std::vector<VelocityGrid> vgrid;
    if (lattice) {
      std::vector<double> layer_epochs;
      for (const Cell& c : cur) {
        const double t = grid.epochs[k][static_cast<std::size_t>(c.epoch)];
        if (layer_epochs.empty() || layer_epochs.back() != t) layer_epochs.push_back(t);
      }
      vgrid = lattice_for(catalog, seq, config, grid, k + 1, layer_epochs);
    }

    std::vector<std::vector<Cell>> per_epoch(next_epochs.size());
    parallel_for(next_epochs.size(), config.grid.workers, [&](std::size_t l) {
      std::map<std::pair<std::int64_t, std::int64_t>, Cell> cells;
      const double t_next = next_epochs[l];
      const std::size_t n_dec = lattice ? vgrid[l].size() : 1;
      for (std::size_t p = 0; p < cur.size(); ++p) {
        const Cell& from = cur[p];
        const double t_from = grid.epochs[k][static_cast<std::size_t>(from.epoch)];
        if (!leg_duration_ok(config.grid, t_next - t_from)) continue;
        OracleState os = oracle_state(k, from, before);
        os.epoch = t_from;
        for (std::size_t b = 0; b < n_dec; ++b) {
          OracleDecision d{static_cast<int>(l), t_next, std::nullopt};
          if (lattice) d.target_velocity = vgrid[l].velocity(b);
          const LegCost cost = oracle.transition(os, d);
          if (!cost.feasible || !std::isfinite(cost.dv)) continue;
          std::int64_t vkey = from.epoch;
          if (lattice) {
            const auto bin = bin_of(vgrid[l], cost.v_arrival);
            if (!bin) continue;
            vkey = static_cast<std::int64_t>(*bin);
          }
          Cell c;
          c.epoch = static_cast<int>(l);
          c.vkey = vkey;
          c.velocity = cost.v_arrival;
          c.mass = mass_after(from.mass, cost.dv, constraints.isp);
          c.mbin = mass_bin(constraints.m0, c.mass, config.mass_bin_kg);
          c.total = from.total + cost.dv;
          c.pred = static_cast<int>(p);
          c.via = cost;
          auto [it, inserted] = cells.try_emplace({c.vkey, c.mbin}, c);
          if (!inserted && c.total < it->second.total) it->second = c;
        }
      }
      for (auto& [key, c] : cells) per_epoch[l].push_back(std::move(c));
    });
    for (auto& v : per_epoch) {
      layers[k + 1].insert(layers[k + 1].end(), std::make_move_iterator(v.begin()),
                           std::make_move_iterator(v.end()));
    }
    if (layers[k + 1].empty()) {
      throw NoSolutionError("no reachable state at event " + std::to_string(k + 1),
                            static_cast<int>(k + 1));
    }
  }

  const std::size_t last = n_events - 1;
  const std::vector<Cell>& fin = layers[last];
  double best = kInf;
  std::size_t arg = 0;
  std::tuple<int, int, std::int64_t, std::int64_t> best_key{};
  LegCost best_closing;
  for (std::size_t s = 0; s < fin.size(); ++s) {
    OracleState os = oracle_state(last, fin[s], last > 0 ? &layers[last - 1] : nullptr);
    os.epoch = grid.epochs[last][static_cast<std::size_t>(fin[s].epoch)];
    const LegCost closing = oracle.terminal(os);
    if (!closing.feasible) continue;
    const double total = fin[s].total + closing.dv;
    const auto key = std::make_tuple(os.predecessor_epoch_index, fin[s].epoch, fin[s].vkey, fin[s].mbin);
    if (total < best || (total == best && key < best_key)) {
      best = total;
      arg = s;
      best_key = key;
      best_closing = closing;
    }
  }
  if (!std::isfinite(best)) {
    throw NoSolutionError("no feasible closing at event " + std::to_string(last), static_cast<int>(last));
  }

  std::vector<const Cell*> chain(n_events, nullptr);
  std::size_t idx = arg;
  for (std::size_t k = last + 1; k-- > 0;) {
    if (idx >= layers[k].size()) throw InternalError("broken back-pointer at event " + std::to_string(k));
    chain[k] = &layers[k][idx];
    if (k > 0) {
      if (chain[k]->pred < 0) throw InternalError("broken back-pointer at event " + std::to_string(k));
      idx = static_cast<std::size_t>(chain[k]->pred);
    }
  }
  return assemble(catalog, seq, constraints, grid, chain, best_closing, best);
}

Solution solve_generic(const BodyCatalog& catalog, const Sequence& seq,
                       const MissionConstraints& constraints, const GenericConfig& config) {
  check_inputs(seq, constraints);
  const TimeGrid grid = TimeGrid::build(seq, config.grid);
  require_nonempty(grid);
  const GridEphemeris eph = GridEphemeris::build(catalog, seq, grid, config.grid);
  const BiImpulseOracle oracle(seq, constraints, grid, eph);
  return solve_generic(catalog, seq, constraints, config, grid, oracle);
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration

Solution brute_force_enumerate(const BodyCatalog& catalog, const Sequence& seq,
                               const MissionConstraints& constraints, const GridConfig& config,
                               std::size_t cap) {
  check_inputs(seq, constraints);
  const TimeGrid grid = TimeGrid::build(seq, config);
  require_nonempty(grid);
  if (product_count(grid) > static_cast<double>(cap)) {
    throw InputError("enumeration cap exceeded: " + std::to_string(product_count(grid)) + " paths");
  }
  const GridEphemeris eph = GridEphemeris::build(catalog, seq, grid, config);
  const std::size_t n_legs = seq.legs();

  // Ties resolve on (e[N-1], e[N], e[N-2], ..., e[0]), the order the DP's
  // back-pointer choices induce.
  auto tie_key = [n_legs](const std::vector<int>& e) {
    std::vector<int> key{e[n_legs - 1], e[n_legs]};
    for (std::size_t k = n_legs - 1; k-- > 0;) key.push_back(e[k]);
    return key;
  };

  std::vector<int> e(n_legs + 1, -1), best_path;
  std::vector<int> best_key;
  double best = kInf;

  auto visit = [&](auto&& self, std::size_t k, double acc) -> void {
    const LegTable& leg = eph.legs[k];
    const auto ek = static_cast<std::size_t>(e[k]);
    for (std::size_t l = 0; l < leg.cols; ++l) {
      const std::size_t idx = leg.at(ek, l);
      if (!leg.feasible[idx]) continue;
      Vec3 v_in;
      if (k > 0) v_in = eph.legs[k - 1].v_arrive[eph.legs[k - 1].at(static_cast<std::size_t>(e[k - 1]), ek)];
      const double a = acc + event_cost(seq, constraints, k, v_in, leg.v_depart[idx], eph.body[k][ek].v).dv;
      e[k + 1] = static_cast<int>(l);
      if (k + 1 == n_legs) {
        const double total = a + closing_cost(seq, constraints, leg.v_arrive[idx], eph.body[n_legs][l].v).dv;
        if (total < best || (total == best && tie_key(e) < best_key)) {
          best = total;
          best_path = e;
          best_key = tie_key(e);
        }
      } else {
        self(self, k + 1, a);
      }
    }
  };
  for (std::size_t i = 0; i < grid.epochs[0].size(); ++i) {
    e[0] = static_cast<int>(i);
    visit(visit, 0, 0.0);
  }
  if (!std::isfinite(best)) throw NoSolutionError("no feasible path", 1);
  return reconstruct(catalog, seq, constraints, grid, eph, config, best_path, best);
}

Solution brute_force_enumerate(const BodyCatalog& catalog, const Sequence& seq,
                               const MissionConstraints& constraints, const GenericConfig& config,
                               const TimeGrid& grid, const CostOracle& oracle, std::size_t cap) {
  check_inputs(seq, constraints);
  check_generic_config(config);
  require_nonempty(grid);
  if (config.keying == VelocityKeying::kLattice) {
    throw InputError("exhaustive enumeration supports predecessor keying only");
  }
  if (product_count(grid) > static_cast<double>(cap)) {
    throw InputError("enumeration cap exceeded: " + std::to_string(product_count(grid)) + " paths");
  }
  const std::size_t n_events = seq.entries.size();
  std::vector<Cell> chain(n_events), best_chain;
  LegCost best_closing;
  double best = kInf;

  auto visit = [&](auto&& self, std::size_t k) -> void {
    const Cell& from = chain[k];
    const double t_from = grid.epochs[k][static_cast<std::size_t>(from.epoch)];
    if (k + 1 == n_events) {
      OracleState os = oracle_state(k, from, nullptr);
      os.epoch = t_from;
      os.predecessor_epoch_index = k > 0 ? chain[k - 1].epoch : -1;
      const LegCost closing = oracle.terminal(os);
      if (closing.feasible && from.total + closing.dv < best) {
        best = from.total + closing.dv;
        best_chain = chain;
        best_closing = closing;
      }
      return;
    }
    OracleState os = oracle_state(k, from, nullptr);
    os.epoch = t_from;
    os.predecessor_epoch_index = k > 0 ? chain[k - 1].epoch : -1;
    for (std::size_t l = 0; l < grid.epochs[k + 1].size(); ++l) {
      const double t_next = grid.epochs[k + 1][l];
      if (!leg_duration_ok(config.grid, t_next - t_from)) continue;
      const LegCost cost = oracle.transition(os, {static_cast<int>(l), t_next, std::nullopt});
      if (!cost.feasible || !std::isfinite(cost.dv)) continue;
      Cell& c = chain[k + 1];
      c.epoch = static_cast<int>(l);
      c.vkey = from.epoch;
      c.velocity = cost.v_arrival;
      c.mass = mass_after(from.mass, cost.dv, constraints.isp);
      c.total = from.total + cost.dv;
      c.via = cost;
      self(self, k + 1);
    }
  };
  for (std::size_t i = 0; i < grid.epochs[0].size(); ++i) {
    Cell c;
    c.epoch = static_cast<int>(i);
    c.velocity = oracle.initial_velocity(c.epoch, grid.epochs[0][i]);
    c.mass = constraints.m0;
    chain[0] = c;
    visit(visit, 0);
  }
  if (!std::isfinite(best)) throw NoSolutionError("no feasible path", 1);
  std::vector<const Cell*> ptrs;
  for (const Cell& c : best_chain) ptrs.push_back(&c);
  return assemble(catalog, seq, constraints, grid, ptrs, best_closing, best);
}

// ---------------------------------------------------------------------------
// Greedy baseline

Solution solve_greedy(const BodyCatalog& catalog, const Sequence& seq,
                      const MissionConstraints& constraints, const GridConfig& config) {
  check_inputs(seq, constraints);
  const TimeGrid grid = TimeGrid::build(seq, config);
  require_nonempty(grid);
  const GridEphemeris eph = GridEphemeris::build(catalog, seq, grid, config, false);
  const std::size_t n_legs = seq.legs();
  std::vector<int> path(n_legs + 1, -1);

  auto arc = [&](std::size_t k, std::size_t i, std::size_t j) {
    if (!leg_duration_ok(config, grid.epochs[k + 1][j] - grid.epochs[k][i])) return LegCost::infeasible();
    return bi_impulse_leg(eph.body[k][i], eph.body[k + 1][j], config.lambert);
  };

  double accumulated = 0.0;
  {
    double best = kInf;
    for (std::size_t i = 0; i < grid.epochs[0].size(); ++i) {
      for (std::size_t j = 0; j < grid.epochs[1].size(); ++j) {
        const LegCost a = arc(0, i, j);
        if (!a.feasible) continue;
        double c = event_cost(seq, constraints, 0, Vec3{}, *a.v_departure, eph.body[0][i].v).dv;
        if (n_legs == 1) c += closing_cost(seq, constraints, a.v_arrival, eph.body[1][j].v).dv;
        if (c < best) {
          best = c;
          path[0] = static_cast<int>(i);
          path[1] = static_cast<int>(j);
        }
      }
    }
    if (!std::isfinite(best)) throw NoSolutionError("greedy: no feasible first leg", 1);
  }
  Vec3 v_in = arc(0, static_cast<std::size_t>(path[0]), static_cast<std::size_t>(path[1])).v_arrival;
  accumulated = event_cost(seq, constraints, 0, Vec3{},
                           *arc(0, static_cast<std::size_t>(path[0]), static_cast<std::size_t>(path[1])).v_departure,
                           eph.body[0][static_cast<std::size_t>(path[0])].v).dv;
  for (std::size_t k = 1; k < n_legs; ++k) {
    const auto j = static_cast<std::size_t>(path[k]);
    double best = kInf;
    double best_stage = kInf;
    Vec3 best_arrival;
    for (std::size_t l = 0; l < grid.epochs[k + 1].size(); ++l) {
      const LegCost a = arc(k, j, l);
      if (!a.feasible) continue;
      const double stage = event_cost(seq, constraints, k, v_in, *a.v_departure, eph.body[k][j].v).dv;
      double c = stage;
      if (k + 1 == n_legs) c += closing_cost(seq, constraints, a.v_arrival, eph.body[k + 1][l].v).dv;
      if (c < best) {
        best = c;
        best_stage = stage;
        best_arrival = a.v_arrival;
        path[k + 1] = static_cast<int>(l);
      }
    }
    if (!std::isfinite(best)) {
      throw NoSolutionError("greedy: dead end at event " + std::to_string(k + 1), static_cast<int>(k + 1));
    }
    accumulated += best_stage;
    v_in = best_arrival;
  }
  accumulated += closing_cost(seq, constraints, v_in,
                              eph.body[n_legs][static_cast<std::size_t>(path[n_legs])].v).dv;
  return reconstruct(catalog, seq, constraints, grid, eph, config, path, accumulated);
}

}  // namespace flyby
