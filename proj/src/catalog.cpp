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

#include "flyby/catalog.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "flyby/errors.hpp"

namespace flyby {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(s.substr(start)));
      break;
    }
    out.push_back(trim(s.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == ',' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && !(s[j] == ' ' || s[j] == '\t' || s[j] == ',' || s[j] == '\r')) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::optional<int> to_int(std::string_view s) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

double wrap_deg_to_rad(double deg) {
  double r = std::fmod(deg * constants::kDeg, constants::kTwoPi);
  if (r < 0.0) r += constants::kTwoPi;
  return r;
}

void check_record(const CatalogRecord& rec, int line) {
  const std::array<double, 7> values{rec.epoch_mjd, rec.a_au,     rec.e,     rec.i_deg,
                                     rec.raan_deg,  rec.argp_deg, rec.m0_deg};
  for (double v : values) {
    if (!std::isfinite(v)) throw ParseError("non-finite value", line);
  }
  if (!(rec.a_au > 0.0)) throw ParseError("semimajor axis must be positive", line);
  if (!(rec.e >= 0.0 && rec.e < 1.0)) throw ParseError("eccentricity out of range", line);
}

}  // namespace

OrbitalElements to_elements(const CatalogRecord& rec) {
  OrbitalElements el;
  el.a = rec.a_au * constants::kAu;
  el.e = rec.e;
  el.i = rec.i_deg * constants::kDeg;
  el.raan = wrap_deg_to_rad(rec.raan_deg);
  el.argp = wrap_deg_to_rad(rec.argp_deg);
  el.m0 = wrap_deg_to_rad(rec.m0_deg);
  el.epoch = Epoch::from_mjd(rec.epoch_mjd);
  return el;
}

Body Body::from_record(int id, std::string name, const CatalogRecord& rec) {
  Body b;
  b.id = id;
  b.name = std::move(name);
  b.record = rec;
  b.elements = to_elements(rec);
  return b;
}

BodyCatalog::BodyCatalog(std::vector<Body> bodies) : bodies_(std::move(bodies)) {
  for (std::size_t k = 0; k < bodies_.size(); ++k) {
    const Body& b = bodies_[k];
    validate_elements(b.elements);
    if (!by_id_.emplace(b.id, k).second) {
      throw InputError("duplicate body id " + std::to_string(b.id));
    }
    by_name_.emplace(b.name, k);
  }
}

const Body* BodyCatalog::find(int id) const {
  const auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &bodies_[it->second];
}

const Body& BodyCatalog::at(int id) const {
  const Body* b = find(id);
  if (b == nullptr) throw InputError("unknown body id " + std::to_string(id));
  return *b;
}

const Body* BodyCatalog::find_by_name(std::string_view name) const {
  const auto it = by_name_.find(std::string(name));
  return it == by_name_.end() ? nullptr : &bodies_[it->second];
}

CartesianState BodyCatalog::state(int id, Epoch t) const {
  return elements_to_state(at(id).elements, t);
}

CartesianState body_state(const BodyCatalog& catalog, int id, Epoch t) {
  return catalog.state(id, t);
}

BodyCatalog parse_catalog_csv(std::istream& in) {
  static constexpr std::array<std::string_view, 9> kColumns{
      "id", "name", "epoch_mjd", "a_au", "e", "i_deg", "raan_deg", "argp_deg", "m0_deg"};

  std::string line;
  int line_no = 0;
  std::array<int, 9> index{};
  index.fill(-1);
  bool have_header = false;
  std::vector<Body> bodies;
  std::unordered_map<int, int> seen_ids;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto fields = split(view, ',');
    if (!have_header) {
      for (std::size_t c = 0; c < kColumns.size(); ++c) {
        const auto it = std::find(fields.begin(), fields.end(), kColumns[c]);
        if (it == fields.end()) {
          throw ParseError("missing column '" + std::string(kColumns[c]) + "'", line_no);
        }
        index[c] = static_cast<int>(it - fields.begin());
      }
      have_header = true;
      continue;
    }
    auto field = [&](std::size_t c) -> std::string_view {
      const auto k = static_cast<std::size_t>(index[c]);
      if (k >= fields.size()) {
        throw ParseError("missing column '" + std::string(kColumns[c]) + "'", line_no);
      }
      return fields[k];
    };
    auto number = [&](std::size_t c) {
      const auto v = to_double(field(c));
      if (!v) {
        throw ParseError("malformed value in column '" + std::string(kColumns[c]) + "'",
                         line_no);
      }
      return *v;
    };
    const auto id = to_int(field(0));
    if (!id) throw ParseError("malformed id", line_no);
    CatalogRecord rec{number(2), number(3), number(4), number(5),
                      number(6), number(7), number(8)};
    check_record(rec, line_no);
    if (const auto [it, inserted] = seen_ids.emplace(*id, line_no); !inserted) {
      throw ParseError("duplicate id " + std::to_string(*id) + " (first seen on line " +
                           std::to_string(it->second) + ")",
                       line_no);
    }
    bodies.push_back(Body::from_record(*id, std::string(field(1)), rec));
  }
  if (!have_header) throw ParseError("missing header", line_no + 1);
  return BodyCatalog(std::move(bodies));
}

BodyCatalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open catalog '" + path.string() + "'");
  return parse_catalog_csv(in);
}

void write_catalog_csv(const BodyCatalog& catalog, std::ostream& out) {
  out << kCatalogHeader << '\n';
  std::ostringstream row;
  row << std::setprecision(17);
  for (const Body& b : catalog.bodies()) {
    const CatalogRecord& r = b.record;
    row.str("");
    row << b.id << ',' << b.name << ',' << r.epoch_mjd << ',' << r.a_au << ',' << r.e << ','
        << r.i_deg << ',' << r.raan_deg << ',' << r.argp_deg << ',' << r.m0_deg;
    out << row.str() << '\n';
  }
}

RawCatalogFormat parse_raw_format(std::string_view name) {
  if (name == "gtoc4") return RawCatalogFormat::kGtoc4;
  if (name == "gtoc11") return RawCatalogFormat::kGtoc11;
  throw InputError("unknown raw catalog format '" + std::string(name) + "'");
}

Body gtoc4_earth() {
  return Body::from_record(0, "Earth",
                           CatalogRecord{54000.0, 0.999988049532578, 1.671681163160e-2,
                                         0.8854353079654e-3, 175.40647696473,
                                         287.61577546182, 257.60683707535});
}

BodyCatalog convert_raw_catalog(std::istream& in, RawCatalogFormat format) {
  std::vector<Body> bodies;
  if (format == RawCatalogFormat::kGtoc4) bodies.push_back(gtoc4_earth());

  std::string line;
  int line_no = 0;
  int next_id = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split_ws(line);
    if (tokens.size() < 8) continue;
    // Last seven tokens are numeric; anything before them is the name.
    std::array<double, 7> values{};
    bool numeric = true;
    for (std::size_t k = 0; k < 7; ++k) {
      const auto v = to_double(tokens[tokens.size() - 7 + k]);
      if (!v) {
        numeric = false;
        break;
      }
      values[k] = *v;
    }
    if (!numeric) continue;  // header or comment line
    std::string name;
    for (std::size_t k = 0; k + 7 < tokens.size(); ++k) {
      if (!name.empty()) name += ' ';
      name += tokens[k];
    }
    const CatalogRecord rec{values[0], values[1], values[2], values[3],
                            values[4], values[5], values[6]};
    check_record(rec, line_no);
    int id = next_id++;
    if (format == RawCatalogFormat::kGtoc11) {
      const auto parsed = to_int(name);
      if (!parsed) throw ParseError("GTOC11 row must start with a numeric id", line_no);
      id = *parsed;
    }
    bodies.push_back(Body::from_record(id, name, rec));
  }
  return BodyCatalog(std::move(bodies));
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kDeparture:
      return "departure";
    case EventKind::kFlyby:
      return "flyby";
    case EventKind::kRendezvous:
      return "rendezvous";
  }
  return "flyby";
}

EventKind parse_event_kind(std::string_view text) {
  if (text == "departure") return EventKind::kDeparture;
  if (text == "flyby") return EventKind::kFlyby;
  if (text == "rendezvous") return EventKind::kRendezvous;
  throw InputError("unknown event kind '" + std::string(text) + "'");
}

TimeWindow Sequence::window(std::size_t k) const {
  TimeWindow w = mission_window;
  if (entries[k].window) {
    w.lo = std::max(w.lo, entries[k].window->lo);
    w.hi = std::min(w.hi, entries[k].window->hi);
  }
  return w;
}

void validate_sequence(const Sequence& seq) {
  const auto& w = seq.mission_window;
  if (!(std::isfinite(w.lo) && std::isfinite(w.hi) && w.lo < w.hi)) {
    throw InputError("mission window must satisfy t0 < tf");
  }
  if (seq.entries.size() < 2) throw InputError("sequence needs at least two entries");
  if (seq.entries.front().kind != EventKind::kDeparture) {
    throw InputError("first sequence entry must be a departure");
  }
  for (std::size_t k = 0; k < seq.entries.size(); ++k) {
    const auto& e = seq.entries[k];
    if (k > 0 && e.kind == EventKind::kDeparture) {
      throw InputError("entry " + std::to_string(k) + ": departure allowed only first");
    }
    if (e.kind == EventKind::kRendezvous && k + 1 != seq.entries.size()) {
      throw InputError("entry " + std::to_string(k) + ": rendezvous allowed only last");
    }
    if (e.window) {
      if (!(std::isfinite(e.window->lo) && std::isfinite(e.window->hi))) {
        throw InputError("entry " + std::to_string(k) + ": non-finite window");
      }
      if (e.window->lo > e.window->hi) {
        throw InputError("entry " + std::to_string(k) + ": window has t_min > t_max");
      }
      if (e.window->lo < w.lo || e.window->hi > w.hi) {
        throw InputError("entry " + std::to_string(k) + ": window outside mission window");
      }
    }
  }
}

Sequence parse_sequence_json(std::string_view text, const BodyCatalog& catalog) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("sequence JSON: ") + e.what());
  }
  Sequence seq;
  try {
    const auto& mw = doc.at("mission_window");
    if (!mw.is_array() || mw.size() != 2) throw InputError("mission_window must be [t0, tf]");
    seq.mission_window = {mw[0].get<double>(), mw[1].get<double>()};
    const auto& entries = doc.at("entries");
    if (!entries.is_array()) throw InputError("entries must be an array");
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const auto& e = entries[k];
      SequenceEntry entry;
      const auto& body = e.at("body");
      const Body* found = nullptr;
      if (body.is_number_integer()) {
        found = catalog.find(body.get<int>());
      } else if (body.is_string()) {
        found = catalog.find_by_name(body.get<std::string>());
      }
      if (found == nullptr) {
        throw InputError("entry " + std::to_string(k) + ": unknown body " + body.dump());
      }
      entry.body_id = found->id;
      entry.kind = parse_event_kind(e.at("kind").get<std::string>());
      if (e.contains("window") && !e.at("window").is_null()) {
        const auto& win = e.at("window");
        if (!win.is_array() || win.size() != 2) {
          throw InputError("entry " + std::to_string(k) + ": window must be [a, b]");
        }
        entry.window = TimeWindow{win[0].get<double>(), win[1].get<double>()};
      }
      seq.entries.push_back(entry);
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("sequence JSON: ") + e.what());
  }
  validate_sequence(seq);
  return seq;
}

Sequence load_sequence(const std::filesystem::path& path, const BodyCatalog& catalog) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open sequence '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_sequence_json(buffer.str(), catalog);
}

std::string sequence_to_json(const Sequence& seq, const BodyCatalog& catalog) {
  using nlohmann::json;
  json doc;
  doc["mission_window"] = {seq.mission_window.lo, seq.mission_window.hi};
  json entries = json::array();
  for (const auto& e : seq.entries) {
    json j;
    j["body"] = catalog.at(e.body_id).name;
    j["kind"] = std::string(to_string(e.kind));
    if (e.window) j["window"] = {e.window->lo, e.window->hi};
    entries.push_back(j);
  }
  doc["entries"] = entries;
  return doc.dump(2);
}

void validate_constraints(const MissionConstraints& c) {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InputError(std::string(what) + " must be positive");
    }
  };
  if (!(c.v_inf_departure_max >= 0.0)) throw InputError("v_inf_departure_max must be >= 0");
  if (c.v_flyby_max) positive(*c.v_flyby_max, "v_flyby_max");
  positive(c.isp, "isp");
  positive(c.m0, "m0");
  positive(c.t_max, "t_max");
  if (!(c.m_min >= 0.0)) throw InputError("m_min must be >= 0");
}

}  // namespace flyby
