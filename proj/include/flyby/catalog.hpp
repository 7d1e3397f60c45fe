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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "flyby/astro.hpp"

namespace flyby {

/// One catalog row in catalog units (AU, degrees, MJD), kept verbatim so that
/// writing a loaded catalog reproduces its numbers exactly.
struct CatalogRecord {
  double epoch_mjd = 0.0;
  double a_au = 0.0;
  double e = 0.0;
  double i_deg = 0.0;
  double raan_deg = 0.0;
  double argp_deg = 0.0;
  double m0_deg = 0.0;
};

OrbitalElements to_elements(const CatalogRecord& rec);

struct Body {
  int id = 0;
  std::string name;
  CatalogRecord record;
  OrbitalElements elements;

  static Body from_record(int id, std::string name, const CatalogRecord& rec);
};

/// Immutable after construction; safe for concurrent reads.
class BodyCatalog {
 public:
  BodyCatalog() = default;
  /// Throws InputError on duplicate ids or invalid elements.
  explicit BodyCatalog(std::vector<Body> bodies);

  std::size_t size() const { return bodies_.size(); }
  const std::vector<Body>& bodies() const { return bodies_; }

  const Body& at(int id) const;
  const Body* find(int id) const;
  const Body* find_by_name(std::string_view name) const;

  CartesianState state(int id, Epoch t) const;

 private:
  std::vector<Body> bodies_;
  std::unordered_map<int, std::size_t> by_id_;
  std::unordered_map<std::string, std::size_t> by_name_;
};

/// Canonical CSV header: id,name,epoch_mjd,a_au,e,i_deg,raan_deg,argp_deg,m0_deg
inline constexpr std::string_view kCatalogHeader =
    "id,name,epoch_mjd,a_au,e,i_deg,raan_deg,argp_deg,m0_deg";

BodyCatalog parse_catalog_csv(std::istream& in);
BodyCatalog load_catalog(const std::filesystem::path& path);
void write_catalog_csv(const BodyCatalog& catalog, std::ostream& out);

enum class RawCatalogFormat { kGtoc4, kGtoc11 };
RawCatalogFormat parse_raw_format(std::string_view name);

/// Reads a competition-distribution asteroid table (whitespace separated:
/// name-or-id, epoch MJD, a AU, e, i deg, LAN deg, argp deg, M deg; non-numeric
/// header lines skipped). The GTOC4 variant prepends Earth as body 0.
BodyCatalog convert_raw_catalog(std::istream& in, RawCatalogFormat format);

/// Earth elements published with the GTOC4 problem statement.
Body gtoc4_earth();

CartesianState body_state(const BodyCatalog& catalog, int id, Epoch t);

enum class EventKind { kDeparture, kFlyby, kRendezvous };
std::string_view to_string(EventKind kind);
EventKind parse_event_kind(std::string_view text);

struct TimeWindow {
  double lo = 0.0;  // MJD2000 days
  double hi = 0.0;
};

struct SequenceEntry {
  int body_id = 0;
  EventKind kind = EventKind::kFlyby;
  std::optional<TimeWindow> window;
};

/// Ordered event list: entry 0 is the departure, the last entry closes the mission.
/// A sequence of N+1 entries has N legs.
struct Sequence {
  TimeWindow mission_window;
  std::vector<SequenceEntry> entries;

  std::size_t legs() const { return entries.empty() ? 0 : entries.size() - 1; }
  /// Entry window clipped to the mission window.
  TimeWindow window(std::size_t k) const;
};

/// Throws InputError when an invariant is violated.
void validate_sequence(const Sequence& seq);

/// Sequence JSON: { "mission_window": [t0, tf], "entries": [ {"body": id-or-name,
/// "kind": "departure|flyby|rendezvous", "window": [a, b]? } ] } (MJD2000 days).
Sequence parse_sequence_json(std::string_view text, const BodyCatalog& catalog);
Sequence load_sequence(const std::filesystem::path& path, const BodyCatalog& catalog);
std::string sequence_to_json(const Sequence& seq, const BodyCatalog& catalog);

/// Mission-level limits. Velocities in m/s, masses in kg, durations in seconds.
struct MissionConstraints {
  double v_inf_departure_max = 4000.0;
  std::optional<double> v_flyby_max;
  double isp = 3000.0;
  double m0 = 1500.0;
  double m_min = 500.0;
  double t_max = 10.0 * 365.25 * constants::kSecondsPerDay;
};

void validate_constraints(const MissionConstraints& c);

}  // namespace flyby
