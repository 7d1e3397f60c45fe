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

// A four-event mission over near-Earth bodies, as catalog CSV and sequence JSON.

namespace flyby::testing {

inline constexpr const char* kFixtureCatalog =
    "id,name,epoch_mjd,a_au,e,i_deg,raan_deg,argp_deg,m0_deg\n"
    "0,Earth,54000,0.999988049532578,0.0167168116316,0.0008854353079654,175.40647696473,"
    "287.61577546182,257.60683707535\n"
    "1,Alpha,54000,1.05,0.08,1.5,40.0,120.0,10.0\n"
    "2,Beta,54000,1.12,0.12,2.5,80.0,200.0,300.0\n"
    "3,Gamma,54000,0.95,0.06,1.0,300.0,30.0,150.0\n";

inline constexpr const char* kFixtureSequence = R"({
  "mission_window": [3000.0, 3900.0],
  "entries": [
    {"body": "Earth", "kind": "departure", "window": [3000.0, 3200.0]},
    {"body": "Alpha", "kind": "flyby", "window": [3150.0, 3450.0]},
    {"body": 2, "kind": "flyby", "window": [3350.0, 3650.0]},
    {"body": "Gamma", "kind": "rendezvous", "window": [3550.0, 3900.0]}
  ]
})";

}  // namespace flyby::testing
