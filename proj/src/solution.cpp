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

#include "flyby/solution.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "flyby/errors.hpp"
#include "flyby/legs.hpp"

namespace flyby {

using nlohmann::json;

namespace {

json vec(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 to_vec(const json& j) {
  if (!j.is_array() || j.size() != 3) throw InputError("expected a 3-vector");
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

std::optional<Vec3> opt_vec(const json& obj, const char* key) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  return to_vec(obj.at(key));
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

}  // namespace

std::vector<double> Solution::epochs() const {
  std::vector<double> out;
  for (const auto& e : events) out.push_back(e.epoch);
  return out;
}

std::string solution_to_json(const Solution& s) {
  json j;
  j["schema_version"] = kSolutionSchemaVersion;
  j["total_dv_mps"] = s.total_dv;
  j["initial_mass_kg"] = s.initial_mass;
  j["final_mass_kg"] = s.final_mass;
  j["grid_step_days"] = s.grid_step_days;
  json events = json::array();
  for (const auto& e : s.events) {
    json ev;
    ev["body_id"] = e.body_id;
    ev["body_name"] = e.body_name;
    ev["kind"] = std::string(to_string(e.kind));
    ev["epoch_mjd2000"] = e.epoch;
    ev["dv_mps"] = e.dv;
    json imp = json::array();
    for (const auto& v : e.impulses) imp.push_back(vec(v));
    ev["impulses_mps"] = imp;
    ev["v_arrival_mps"] = e.v_arrival ? vec(*e.v_arrival) : json(nullptr);
    ev["v_departure_mps"] = e.v_departure ? vec(*e.v_departure) : json(nullptr);
    ev["v_rel_mps"] = e.v_rel ? vec(*e.v_rel) : json(nullptr);
    ev["mass_after_kg"] = e.mass_after;
    events.push_back(ev);
  }
  j["events"] = events;
  json hist = json::array();
  for (const auto& h : s.refinement) {
    hist.push_back({{"step_days", h.step_days}, {"total_dv_mps", h.total_dv}, {"seconds", h.seconds}});
  }
  j["refinement"] = hist;
  if (s.error_bound) {
    const auto& b = *s.error_bound;
    j["error_bound"] = {{"stages", b.stages},         {"eps_max_mps", b.eps_max},
                        {"solution_dv_mps", b.solution_dv}, {"bound_mps", b.bound},
                        {"exact", b.exact},           {"statement", b.statement}};
  } else {
    j["error_bound"] = nullptr;
  }
  return j.dump(2);
}

Solution solution_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("solution JSON: ") + e.what());
  }
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kSolutionSchemaVersion) {
      throw InputError("unsupported solution schema version " + std::to_string(version));
    }
    Solution s;
    s.total_dv = j.at("total_dv_mps").get<double>();
    s.initial_mass = j.at("initial_mass_kg").get<double>();
    s.final_mass = j.at("final_mass_kg").get<double>();
    s.grid_step_days = j.value("grid_step_days", 0.0);
    for (const auto& ev : j.at("events")) {
      EventRecord e;
      e.body_id = ev.at("body_id").get<int>();
      e.body_name = ev.value("body_name", std::string{});
      e.kind = parse_event_kind(ev.at("kind").get<std::string>());
      e.epoch = ev.at("epoch_mjd2000").get<double>();
      e.dv = ev.at("dv_mps").get<double>();
      if (ev.contains("impulses_mps")) {
        for (const auto& v : ev.at("impulses_mps")) e.impulses.push_back(to_vec(v));
      }
      e.v_arrival = opt_vec(ev, "v_arrival_mps");
      e.v_departure = opt_vec(ev, "v_departure_mps");
      e.v_rel = opt_vec(ev, "v_rel_mps");
      e.mass_after = ev.at("mass_after_kg").get<double>();
      s.events.push_back(std::move(e));
    }
    if (j.contains("refinement")) {
      for (const auto& h : j.at("refinement")) {
        s.refinement.push_back({h.at("step_days").get<double>(), h.at("total_dv_mps").get<double>(),
                                h.at("seconds").get<double>()});
      }
    }
    if (j.contains("error_bound") && !j.at("error_bound").is_null()) {
      const auto& b = j.at("error_bound");
      s.error_bound = BoundCertificate{b.at("stages").get<int>(),        b.at("eps_max_mps").get<double>(),
                                       b.at("solution_dv_mps").get<double>(), b.at("bound_mps").get<double>(),
                                       b.at("exact").get<bool>(),        b.value("statement", std::string{})};
    }
    return s;
  } catch (const json::exception& e) {
    throw InputError(std::string("solution JSON: ") + e.what());
  }
}

ValidationReport validate_solution(const Solution& s, const BodyCatalog& catalog,
                                   const Sequence* sequence, const MissionConstraints& c,
                                   double tolerance) {
  ValidationReport rep;
  auto issue = [&](std::string msg) {
    rep.ok = false;
    rep.issues.push_back(std::move(msg));
  };
  auto close = [&](double a, double b, double abs_floor) {
    return std::abs(a - b) <= std::max(abs_floor, tolerance * std::max(std::abs(a), std::abs(b)));
  };
  const std::size_t n = s.events.size();
  if (n < 2) {
    issue("solution has fewer than two events");
    return rep;
  }
  if (sequence) {
    if (sequence->entries.size() != n) {
      issue("event count " + std::to_string(n) + " does not match the sequence");
    } else {
      for (std::size_t k = 0; k < n; ++k) {
        const auto& e = sequence->entries[k];
        if (e.body_id != s.events[k].body_id || e.kind != s.events[k].kind) {
          issue("event " + std::to_string(k) + " does not match the sequence entry");
        }
        const TimeWindow w = sequence->window(k);
        if (s.events[k].epoch < w.lo - 1e-9 || s.events[k].epoch > w.hi + 1e-9) {
          issue("event " + std::to_string(k) + " epoch outside its window");
        }
      }
    }
  }

  for (std::size_t k = 0; k < n; ++k) {
    if (!catalog.find(s.events[k].body_id)) {
      issue("unknown body id " + std::to_string(s.events[k].body_id));
      return rep;
    }
  }

  double total = 0.0;
  double mass = c.m0;
  if (!close(s.initial_mass, c.m0, 1e-9)) issue("initial mass differs from the configured m0");
  for (std::size_t k = 0; k < n; ++k) {
    const EventRecord& e = s.events[k];
    const CartesianState body = catalog.state(e.body_id, Epoch{e.epoch});
    if (k + 1 < n) {
      if (!e.v_departure) {
        issue("event " + std::to_string(k) + " lacks a departure velocity");
        return rep;
      }
      const EventRecord& nx = s.events[k + 1];
      if (!(nx.epoch > e.epoch)) issue("event " + std::to_string(k + 1) + " is not after its predecessor");
      const CartesianState target = catalog.state(nx.body_id, Epoch{nx.epoch});
      const Propagation p = propagate({body.r, *e.v_departure, body.epoch},
                                      (nx.epoch - e.epoch) * constants::kSecondsPerDay);
      const double miss = norm(p.state.r - target.r);
      if (!(miss <= std::max(1000.0, 1e-8 * norm(target.r)))) {
        issue("leg " + std::to_string(k) + " misses the next body by " + std::to_string(miss) + " m");
      }
      if (nx.v_arrival && !(norm(p.state.v - *nx.v_arrival) <= 1e-3 + 1e-8 * norm(p.state.v))) {
        issue("leg " + std::to_string(k) + " arrival velocity inconsistent with propagation");
      }
    }
    LegCost cost;
    if (k == 0) {
      cost = departure_cost(*e.v_departure, body.v, c.v_inf_departure_max);
    } else if (!e.v_arrival) {
      issue("event " + std::to_string(k) + " lacks an arrival velocity");
      return rep;
    } else if (k + 1 < n) {
      cost = c.v_flyby_max ? flyby_cost_constrained(*e.v_arrival, *e.v_departure, body.v, *c.v_flyby_max)
                           : flyby_cost_unconstrained(*e.v_arrival, *e.v_departure, body.v);
    } else if (e.kind == EventKind::kRendezvous) {
      cost = rendezvous_cost(*e.v_arrival, body.v);
    } else {
      cost = terminal_flyby_cost(*e.v_arrival, body.v, c.v_flyby_max);
    }
    if (!close(cost.dv, e.dv, 1e-3)) {
      issue("event " + std::to_string(k) + " dv " + fmt(e.dv) + " m/s, recomputed " + fmt(cost.dv));
    }
    if (c.v_flyby_max && k > 0 && e.kind == EventKind::kFlyby && e.v_rel &&
        norm(*e.v_rel) > *c.v_flyby_max + 1e-6) {
      issue("event " + std::to_string(k) + " relative flyby speed exceeds the cap");
    }
    total += cost.dv;
    mass = mass_after(mass, cost.dv, c.isp);
    if (!close(mass, e.mass_after, 1e-6)) {
      issue("event " + std::to_string(k) + " mass " + fmt(e.mass_after) + " kg, recomputed " + fmt(mass));
    }
  }
  rep.recomputed_dv = total;
  rep.recomputed_final_mass = mass;
  if (!close(total, s.total_dv, 1e-3)) issue("total dv " + fmt(s.total_dv) + " m/s, recomputed " + fmt(total));
  if (!close(mass, s.final_mass, 1e-6)) issue("final mass " + fmt(s.final_mass) + " kg, recomputed " + fmt(mass));
  if (mass < c.m_min) issue("final mass " + fmt(mass) + " kg below the minimum " + fmt(c.m_min));
  const double duration = (s.events.back().epoch - s.events.front().epoch) * constants::kSecondsPerDay;
  if (duration > c.t_max) issue("mission duration exceeds t_max");
  return rep;
}

std::string export_plot_csv(const Solution& s, const BodyCatalog& catalog, double sample_days) {
  if (!(sample_days > 0.0)) throw InputError("plot sampling interval must be positive");
  std::ostringstream os;
  os << std::setprecision(12);
  os << "leg,epoch_mjd2000,x_au,y_au,z_au,r_au\n";
  for (std::size_t k = 0; k + 1 < s.events.size(); ++k) {
    const EventRecord& e = s.events[k];
    if (!e.v_departure) throw InputError("event " + std::to_string(k) + " lacks a departure velocity");
    const CartesianState start{catalog.state(e.body_id, Epoch{e.epoch}).r, *e.v_departure, Epoch{e.epoch}};
    const double span = s.events[k + 1].epoch - e.epoch;
    const auto steps = static_cast<std::size_t>(std::ceil(span / sample_days));
    for (std::size_t i = 0; i <= steps; ++i) {
      const double dt = std::min(span, static_cast<double>(i) * sample_days);
      const Vec3 r = propagate(start, dt * constants::kSecondsPerDay).state.r / constants::kAu;
      os << k << ',' << e.epoch + dt << ',' << r.x << ',' << r.y << ',' << r.z << ',' << norm(r) << '\n';
    }
  }
  return os.str();
}

}  // namespace flyby
