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

#include "flyby/legs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace flyby {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LegCost with_impulses(double dv, const Vec3& first, const Vec3& second, int count) {
  LegCost c;
  c.dv = dv;
  c.impulses = {first, second};
  c.impulse_count = count;
  return c;
}

// Closed-form pieces of f(theta) = |a - u(theta)| + |u(theta) - b| with u on the
// circle of radius r in the plane of a and b, theta measured from a.
struct ArcObjective {
  double a, b, r, phi;

  double d1(double t) const { return std::sqrt(std::max(0.0, a * a + r * r - 2.0 * a * r * std::cos(t))); }
  double d2(double t) const {
    return std::sqrt(std::max(0.0, b * b + r * r - 2.0 * b * r * std::cos(phi - t)));
  }
  double value(double t) const { return d1(t) + d2(t); }
  void slope(double t, double& g, double& h) const {
    const double p = d1(t);
    const double q = d2(t);
    const double s1 = a * r * std::sin(t) / p;
    const double s2 = b * r * std::sin(phi - t) / q;
    g = s1 - s2;
    h = (a * r * std::cos(t) - s1 * s1) / p + (b * r * std::cos(phi - t) - s2 * s2) / q;
  }
};

// Root of f' on [0, phi]; f' < 0 at 0 and > 0 at phi. Newton steps, falling back
// to bisection whenever a step leaves the bracket.
double minimize_on_arc(const ArcObjective& f) {
  double lo = 0.0;
  double hi = f.phi;
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    double g, h;
    f.slope(t, g, h);
    if (g == 0.0) return t;
    if (g < 0.0) lo = t; else hi = t;
    if (hi - lo < 1e-15) break;
    double next = (h > 0.0) ? t - g / h : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) < 1e-15) return next;
    t = next;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

LegCost LegCost::infeasible() {
  LegCost c;
  c.dv = kInf;
  c.feasible = false;
  return c;
}

LegCost departure_cost(const Vec3& v_required, const Vec3& v_body, double v_inf_max) {
  const Vec3 rel = v_required - v_body;
  const double s = norm(rel);
  LegCost c;
  if (s > v_inf_max) {
    c = with_impulses(s - v_inf_max, rel * ((s - v_inf_max) / s), {}, 1);
  }
  c.v_departure = v_required;
  c.flyby_v_rel = rel;
  return c;
}

LegCost flyby_cost_unconstrained(const Vec3& v_in, const Vec3& v_out, const Vec3& v_body) {
  LegCost c = with_impulses(norm(v_out - v_in), v_out - v_in, {}, 1);
  c.v_departure = v_out;
  c.flyby_v_rel = v_out - v_body;
  return c;
}

LegCost flyby_cost_constrained(const Vec3& v_in, const Vec3& v_out, const Vec3& v_body,
                               double v_rel_max) {
  if (!(v_rel_max >= 0.0)) throw InputError("flyby relative-speed cap must be non-negative");
  const Vec3 a = v_in - v_body;
  const Vec3 b = v_out - v_body;
  const Vec3 ab = b - a;
  const double ab2 = dot(ab, ab);
  const double t = ab2 > 0.0 ? std::clamp(-dot(a, ab) / ab2, 0.0, 1.0) : 0.0;
  const Vec3 closest = a + ab * t;

  Vec3 u;
  if (norm(closest) <= v_rel_max) {
    u = closest;
  } else {
    const double na = norm(a);
    const double nb = norm(b);
    const Vec3 e1 = a / na;
    const Vec3 w = b - e1 * dot(b, e1);
    const double nw = norm(w);
    if (nw <= 1e-14 * nb) {
      u = e1 * v_rel_max;
    } else {
      const Vec3 e2 = w / nw;
      const ArcObjective f{na, nb, v_rel_max, std::atan2(nw, dot(b, e1))};
      const double theta = minimize_on_arc(f);
      u = (e1 * std::cos(theta) + e2 * std::sin(theta)) * v_rel_max;
    }
  }
  LegCost c = with_impulses(norm(u - a) + norm(b - u), u - a, b - u, 2);
  c.v_departure = v_out;
  c.flyby_v_rel = u;
  return c;
}

LegCost rendezvous_cost(const Vec3& v_arrival, const Vec3& v_body) {
  LegCost c = with_impulses(norm(v_body - v_arrival), v_body - v_arrival, {}, 1);
  c.v_arrival = v_arrival;
  c.flyby_v_rel = Vec3{};
  return c;
}

LegCost terminal_flyby_cost(const Vec3& v_arrival, const Vec3& v_body,
                            std::optional<double> v_rel_max) {
  const Vec3 rel = v_arrival - v_body;
  const double s = norm(rel);
  LegCost c;
  c.v_arrival = v_arrival;
  c.flyby_v_rel = rel;
  if (v_rel_max && s > *v_rel_max) {
    const double dv = s - *v_rel_max;
    c = with_impulses(dv, rel * (-dv / s), {}, 1);
    c.v_arrival = v_arrival;
    c.flyby_v_rel = rel * (*v_rel_max / s);
  }
  return c;
}

double mass_after(double m_before, double dv, double isp) {
  return m_before * std::exp(-dv / (constants::kG0 * isp));
}

LegCost bi_impulse_leg(const CartesianState& a, const CartesianState& b, const LambertConfig& config) {
  const double tof = b.epoch.seconds() - a.epoch.seconds();
  if (!(tof > 0.0)) return LegCost::infeasible();
  std::vector<LambertArc> arcs;
  try {
    for (int n = 0; n <= config.max_revolutions; ++n) {
      auto more = solve_lambert({a.r, b.r, tof, config.direction, n});
      if (more.empty()) break;
      arcs.insert(arcs.end(), more.begin(), more.end());
    }
  } catch (const InputError&) {
    return LegCost::infeasible();
  } catch (const NumericalError&) {
    return LegCost::infeasible();
  }
  if (arcs.empty()) return LegCost::infeasible();
  std::size_t best = 0;
  double best_cost = kInf;
  for (std::size_t k = 0; k < arcs.size(); ++k) {
    const double cost = norm(arcs[k].v1 - a.v) + norm(arcs[k].v2 - b.v);
    if (cost < best_cost) {
      best_cost = cost;
      best = k;
    }
  }
  LegCost c;
  c.v_departure = arcs[best].v1;
  c.v_arrival = arcs[best].v2;
  return c;
}

LegCost bi_impulse_leg(const BodyCatalog& catalog, int body_a, Epoch t_a, int body_b, Epoch t_b,
                       const LambertConfig& config) {
  return bi_impulse_leg(catalog.state(body_a, t_a), catalog.state(body_b, t_b), config);
}

LegCost CostOracle::terminal(const OracleState& last) const {
  LegCost c;
  c.v_arrival = last.velocity;
  return c;
}

Vec3 CostOracle::initial_velocity(int, double) const { return {}; }

}  // namespace flyby
