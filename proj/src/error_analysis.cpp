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

#include "flyby/error_analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include "flyby/errors.hpp"
#include "flyby/parallel.hpp"

namespace flyby {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxAttempts = 100000;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t leg, std::uint64_t sample) {
  return splitmix64(splitmix64(splitmix64(seed) ^ leg) ^ sample);
}

// Flyby stage cost at exact epochs; nothing when either arc is infeasible.
std::optional<double> flyby_term(const BodyCatalog& catalog, const Sequence& seq,
                                 const MissionConstraints& c, std::size_t k, double t0, double t1,
                                 double t2, const LambertConfig& lambert) {
  if (!(t0 < t1 && t1 < t2)) return std::nullopt;
  const int a = seq.entries[k - 1].body_id;
  const int b = seq.entries[k].body_id;
  const int d = seq.entries[k + 1].body_id;
  const LegCost in = bi_impulse_leg(catalog, a, Epoch{t0}, b, Epoch{t1}, lambert);
  if (!in.feasible) return std::nullopt;
  const LegCost out = bi_impulse_leg(catalog, b, Epoch{t1}, d, Epoch{t2}, lambert);
  if (!out.feasible) return std::nullopt;
  const Vec3 vb = catalog.state(b, Epoch{t1}).v;
  return event_cost(seq, c, k, in.v_arrival, *out.v_departure, vb).dv;
}

}  // namespace

ErrorReport leg_error_stats(const BodyCatalog& catalog, const Sequence& seq,
                            const MissionConstraints& constraints, double step_days,
                            std::size_t samples, std::uint64_t seed, const ErrorStatsConfig& config) {
  validate_sequence(seq);
  validate_constraints(constraints);
  if (!(step_days > 0.0) || !std::isfinite(step_days)) throw InputError("step must be positive");
  if (samples < 1) throw InputError("samples must be at least 1");
  if (seq.entries.size() < 3) throw InputError("error statistics need at least one flyby event");
  const double origin = config.origin.value_or(seq.mission_window.lo);

  auto floor_lattice = [&](double t) { return origin + std::floor((t - origin) / step_days) * step_days; };
  auto round_lattice = [&](double t) { return origin + std::round((t - origin) / step_days) * step_days; };

  ErrorReport report;
  report.step = step_days;
  double sum = 0.0;
  for (std::size_t k = 1; k + 1 < seq.entries.size(); ++k) {
    const TimeWindow w0 = seq.window(k - 1);
    const TimeWindow w1 = seq.window(k);
    const TimeWindow w2 = seq.window(k + 1);
    std::vector<double> errors(samples, 0.0);
    parallel_for(samples, config.workers, [&](std::size_t s) {
      std::mt19937_64 rng(sample_seed(seed, k, s));
      std::uniform_real_distribution<double> u0(w0.lo, w0.hi), u1(w1.lo, w1.hi), u2(w2.lo, w2.hi);
      for (std::size_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
        const double t[3] = {u0(rng), u1(rng), u2(rng)};
        const auto base = flyby_term(catalog, seq, constraints, k, t[0], t[1], t[2], config.lambert);
        if (!base) continue;
        double worst = -1.0;
        if (config.rounding == RoundingMode::kNearest) {
          const auto v = flyby_term(catalog, seq, constraints, k, round_lattice(t[0]), round_lattice(t[1]),
                                    round_lattice(t[2]), config.lambert);
          if (v) worst = std::abs(*v - *base);
        } else {
          const double lo[3] = {floor_lattice(t[0]), floor_lattice(t[1]), floor_lattice(t[2])};
          for (int corner = 0; corner < 8; ++corner) {
            double r[3];
            for (int a = 0; a < 3; ++a) r[a] = lo[a] + (((corner >> a) & 1) ? step_days : 0.0);
            const auto v = flyby_term(catalog, seq, constraints, k, r[0], r[1], r[2], config.lambert);
            if (v) worst = std::max(worst, std::abs(*v - *base));
          }
        }
        if (worst < 0.0) continue;
        errors[s] = worst;
        return;
      }
      throw InputError("could not draw a feasible ordered epoch triple for event " + std::to_string(k));
    });
    LegErrorStats leg;
    leg.event = k;
    leg.samples = samples;
    double leg_sum = 0.0;
    for (double e : errors) {
      leg_sum += e;
      leg.max_abs_error = std::max(leg.max_abs_error, e);
    }
    leg.mean_abs_error = leg_sum / static_cast<double>(samples);
    sum += leg_sum;
    report.samples += samples;
    report.max_abs_error = std::max(report.max_abs_error, leg.max_abs_error);
    report.per_leg.push_back(leg);
  }
  report.mean_abs_error = sum / static_cast<double>(report.samples);
  return report;
}

std::string error_reports_csv(const std::vector<ErrorReport>& reports) {
  std::ostringstream os;
  os << std::setprecision(10) << "step_days,samples,mean_abs_error_mps,max_abs_error_mps\n";
  for (const auto& r : reports) {
    os << r.step << ',' << r.samples << ',' << r.mean_abs_error << ',' << r.max_abs_error << '\n';
  }
  return os.str();
}

namespace {

struct GridTables {
  TimeGrid grid;
  GridEphemeris eph;
};

// Stage cost term `term` (1-based) over the epoch indices of events
// (term-2, term-1, term), or (0, 1) for the first term.
std::optional<double> stage_term(const Sequence& seq, const MissionConstraints& c, const GridTables& g,
                                 std::size_t term, const std::array<int, 3>& idx) {
  const std::size_t n_legs = seq.legs();
  const auto& legs = g.eph.legs;
  if (term == 1) {
    const auto i = static_cast<std::size_t>(idx[0]);
    const auto j = static_cast<std::size_t>(idx[1]);
    const std::size_t at = legs[0].at(i, j);
    if (!legs[0].feasible[at]) return std::nullopt;
    double v = event_cost(seq, c, 0, Vec3{}, legs[0].v_depart[at], g.eph.body[0][i].v).dv;
    if (n_legs == 1) v += closing_cost(seq, c, legs[0].v_arrive[at], g.eph.body[1][j].v).dv;
    return v;
  }
  const std::size_t e = term - 1;  // flyby event
  const auto a = static_cast<std::size_t>(idx[0]);
  const auto b = static_cast<std::size_t>(idx[1]);
  const auto d = static_cast<std::size_t>(idx[2]);
  const std::size_t in = legs[e - 1].at(a, b);
  const std::size_t out = legs[e].at(b, d);
  if (!legs[e - 1].feasible[in] || !legs[e].feasible[out]) return std::nullopt;
  double v = event_cost(seq, c, e, legs[e - 1].v_arrive[in], legs[e].v_depart[out], g.eph.body[e][b].v).dv;
  if (term == n_legs) v += closing_cost(seq, c, legs[e].v_arrive[out], g.eph.body[e + 1][d].v).dv;
  return v;
}

// Coarse epoch indices bracketing t (one when t is a coarse point).
std::vector<int> bracket(const std::vector<double>& coarse, double t) {
  const auto it = std::lower_bound(coarse.begin(), coarse.end(), t - 1e-9);
  const auto hi = static_cast<int>(it - coarse.begin());
  if (it != coarse.end() && std::abs(*it - t) <= 1e-9) return {hi};
  std::vector<int> out;
  if (hi > 0) out.push_back(hi - 1);
  if (hi < static_cast<int>(coarse.size())) out.push_back(hi);
  return out;
}

}  // namespace

EpsEnumeration enumerate_eps_max(const BodyCatalog& catalog, const Sequence& seq,
                                 const MissionConstraints& constraints, const GridConfig& coarse_cfg,
                                 const GridConfig& fine_cfg) {
  validate_sequence(seq);
  validate_constraints(constraints);
  GridTables coarse{TimeGrid::build(seq, coarse_cfg), {}};
  GridTables fine{TimeGrid::build(seq, fine_cfg), {}};
  coarse.eph = GridEphemeris::build(catalog, seq, coarse.grid, coarse_cfg);
  fine.eph = GridEphemeris::build(catalog, seq, fine.grid, fine_cfg);
  const std::size_t n_legs = seq.legs();

  // Coarse neighbours of every fine epoch, per event.
  std::vector<std::vector<std::vector<int>>> nb(seq.entries.size());
  for (std::size_t k = 0; k < seq.entries.size(); ++k) {
    for (double t : fine.grid.epochs[k]) nb[k].push_back(bracket(coarse.grid.epochs[k], t));
  }

  EpsEnumeration result;
  for (std::size_t term = 1; term <= n_legs; ++term) {
    const std::size_t first = term == 1 ? 0 : term - 2;
    const std::size_t arity = term == 1 ? 2 : 3;
    const std::size_t n0 = fine.grid.epochs[first].size();
    std::vector<double> worst(n0, 0.0);
    parallel_for(n0, fine_cfg.workers, [&](std::size_t i0) {
      std::array<int, 3> f{static_cast<int>(i0), 0, 0};
      const std::size_t n1 = fine.grid.epochs[first + 1].size();
      const std::size_t n2 = arity == 3 ? fine.grid.epochs[first + 2].size() : 1;
      for (std::size_t i1 = 0; i1 < n1; ++i1) {
        for (std::size_t i2 = 0; i2 < n2; ++i2) {
          f[1] = static_cast<int>(i1);
          f[2] = static_cast<int>(i2);
          const auto exact = stage_term(seq, constraints, fine, term, f);
          if (!exact) continue;
          const auto& c0 = nb[first][i0];
          const auto& c1 = nb[first + 1][i1];
          static const std::vector<int> kNone{0};
          const auto& c2 = arity == 3 ? nb[first + 2][i2] : kNone;
          if (c0.empty() || c1.empty() || c2.empty()) {
            worst[i0] = kInf;
            return;
          }
          for (int a : c0) {
            for (int b : c1) {
              for (int d : c2) {
                const auto approx = stage_term(seq, constraints, coarse, term, {a, b, d});
                if (!approx) {
                  worst[i0] = kInf;
                  return;
                }
                worst[i0] = std::max(worst[i0], std::abs(*approx - *exact));
              }
            }
          }
        }
      }
    });
    double e = 0.0;
    for (double w : worst) e = std::max(e, w);
    result.per_term.push_back(e);
    result.eps_max = std::max(result.eps_max, e);
  }
  return result;
}

BoundCertificate certify_bound(const Solution& solution, double eps_max, bool exact) {
  if (!(eps_max >= 0.0)) throw InputError("eps_max must be non-negative");
  if (solution.events.size() < 2) throw InputError("solution has no legs");
  BoundCertificate b;
  b.stages = static_cast<int>(solution.events.size() - 1);
  b.eps_max = eps_max;
  b.solution_dv = solution.total_dv;
  b.bound = b.stages * eps_max;
  std::ostringstream os;
  os << std::setprecision(10);
  if (eps_max == 0.0) {
    os << "solution is continuous-optimal";
  } else {
    os << "total dv " << b.solution_dv << " m/s <= continuous optimum + " << b.bound << " m/s ("
       << b.stages << " x " << eps_max << ", " << (exact ? "exact" : "estimated") << " eps_max)";
  }
  b.statement = os.str();
  return b;
}

}  // namespace flyby
