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

#include <vector>

#include "flyby/astro.hpp"
#include "flyby/errors.hpp"
#include "flyby/vec3.hpp"

namespace flyby {

enum class Direction { kPrograde, kRetrograde };
enum class Branch { kSingle, kShortPeriod, kLongPeriod };

struct LambertQuery {
  Vec3 r1;
  Vec3 r2;
  double tof = 0.0;  // s
  Direction direction = Direction::kPrograde;
  int revolutions = 0;  // exact number of complete revolutions
};

struct LambertArc {
  Vec3 v1;
  Vec3 v2;
  int revolutions = 0;
  Branch branch = Branch::kSingle;
};

/// Thrown when the transfer angle is within 0.1 deg of 180 deg, or the two
/// position vectors coincide in direction so the transfer plane is undefined.
class IllConditionedGeometry : public InputError {
 public:
  using InputError::InputError;
};

/// Solves the two-body boundary value problem (Izzo's formulation with Householder
/// iterations). A zero-revolution query yields one arc; an N-revolution query yields
/// both branches, or nothing when the tof is below the N-revolution minimum.
/// Prograde means positive angular momentum z-component.
std::vector<LambertArc> solve_lambert(const LambertQuery& q, double mu = constants::kMuSun);

/// Minimum time of flight (s) for which an arc with `revolutions` complete
/// revolutions exists. For zero revolutions every tof is reachable by some conic;
/// the returned value is then the parabolic limit, below which the arc is hyperbolic.
double min_energy_tof(const Vec3& r1, const Vec3& r2, int revolutions,
                      Direction direction = Direction::kPrograde,
                      double mu = constants::kMuSun);

}  // namespace flyby
