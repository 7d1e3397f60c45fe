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

#include <compare>

#include "flyby/vec3.hpp"

namespace flyby {

namespace constants {
inline constexpr double kMuSun = 1.32712440018e20;       // m^3/s^2
inline constexpr double kG0 = 9.80665;                   // m/s^2
inline constexpr double kAu = 1.49597870691e11;          // m
inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kMjdToMjd2000 = 51544.5;         // MJD2000 = MJD - 51544.5
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kDeg = kPi / 180.0;
}  // namespace constants

/// Days since the MJD2000 reference.
struct Epoch {
  double mjd2000 = 0.0;

  constexpr double seconds() const { return mjd2000 * constants::kSecondsPerDay; }
  static constexpr Epoch from_mjd(double mjd) { return {mjd - constants::kMjdToMjd2000}; }
  constexpr double mjd() const { return mjd2000 + constants::kMjdToMjd2000; }

  friend constexpr auto operator<=>(const Epoch&, const Epoch&) = default;
};

/// Keplerian elements of an elliptic orbit. SI units, angles in radians.
struct OrbitalElements {
  double a = 0.0;
  double e = 0.0;
  double i = 0.0;
  double raan = 0.0;
  double argp = 0.0;
  double m0 = 0.0;
  Epoch epoch;
};

struct CartesianState {
  Vec3 r;
  Vec3 v;
  Epoch epoch;
};

/// Eccentric anomaly E with E - e sin E = M, for 0 <= e < 1.
/// Throws NumericalError when the 50-iteration cap is hit.
double solve_kepler(double mean_anomaly, double e);

/// Throws InputError for invalid elements (a <= 0, e outside [0,1), non-finite).
void validate_elements(const OrbitalElements& el);

CartesianState elements_to_state(const OrbitalElements& el, Epoch t, double mu = constants::kMuSun);

/// Osculating elements of an elliptic state (angles normalized to [0, 2pi)).
OrbitalElements state_to_elements(const CartesianState& s, double mu = constants::kMuSun);

double specific_energy(const Vec3& r, const Vec3& v, double mu = constants::kMuSun);
Vec3 angular_momentum(const Vec3& r, const Vec3& v);
double eccentricity(const Vec3& r, const Vec3& v, double mu = constants::kMuSun);
/// Inclination w.r.t. the reference x-y plane, radians in [0, pi].
double inclination(const Vec3& r, const Vec3& v);
double orbital_period(double a, double mu = constants::kMuSun);

struct Propagation {
  CartesianState state;
  /// False when the arc dips below the configured minimum radius.
  bool feasible = true;
};

/// Two-body propagation by `dt` seconds (universal variables; elliptic or hyperbolic;
/// negative dt allowed). `min_radius` > 0 enables the collision check along the arc.
Propagation propagate(const CartesianState& s, double dt, double mu = constants::kMuSun,
                      double min_radius = 0.0);

}  // namespace flyby
