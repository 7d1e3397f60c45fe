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

#include <doctest.h>

#include <cmath>
#include <random>

#include "flyby/astro.hpp"
#include "flyby/errors.hpp"
#include "support/integrator.hpp"

using namespace flyby;
using constants::kPi;

namespace {

double rel(const Vec3& a, const Vec3& b) { return norm(a - b) / norm(b); }

// Independent root of E - e sin E = M by bisection on [M - e, M + e].
double kepler_bisection(double m, double e) {
  double lo = m - e, hi = m + e;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid - e * std::sin(mid) - m > 0.0) hi = mid; else lo = mid;
  }
  return 0.5 * (lo + hi);
}

OrbitalElements earth_like() {
  return {constants::kAu * 0.999988, 0.0167168, 0.0000155, 175.4 * constants::kDeg,
          287.6 * constants::kDeg, 257.6 * constants::kDeg, Epoch::from_mjd(54000.0)};
}

OrbitalElements random_elements(std::mt19937_64& rng, double e_max = 0.6) {
  std::uniform_real_distribution<double> a(0.5, 5.0), e(0.0, e_max), inc(0.0, kPi), ang(0.0, 2 * kPi);
  return {a(rng) * constants::kAu, e(rng), inc(rng), ang(rng), ang(rng), ang(rng), Epoch{1000.0}};
}

}  // namespace

TEST_CASE("epoch conversions") {
  const Epoch t = Epoch::from_mjd(58676.2);
  CHECK(t.mjd2000 == doctest::Approx(7131.7).epsilon(1e-14));
  CHECK(Epoch{2.5}.seconds() == 2.5 * 86400.0);
  CHECK(Epoch{1.0} < Epoch{1.5});
  CHECK(constants::kMuSun == 1.32712440018e20);
  CHECK(constants::kG0 == 9.80665);
}

TEST_CASE("kepler fixed points") {
  CHECK(solve_kepler(0.0, 0.5) == 0.0);
  CHECK(solve_kepler(kPi, 0.9) == doctest::Approx(kPi).epsilon(1e-15));
}

TEST_CASE("kepler agrees with bisection oracle") {
  const double e_anom = solve_kepler(1.0, 0.3);
  CHECK(std::abs(e_anom - kepler_bisection(1.0, 0.3)) < 1e-12);
  CHECK(std::abs(e_anom - 0.3 * std::sin(e_anom) - 1.0) < 1e-12);
}

TEST_CASE("kepler residual over random inputs") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> m(0.0, 2 * kPi), e(0.0, 0.999);
  for (int i = 0; i < 20000; ++i) {
    const double mm = m(rng), ee = e(rng);
    const double E = solve_kepler(mm, ee);
    REQUIRE(std::abs(E - ee * std::sin(E) - mm) < 1e-12);
  }
}

TEST_CASE("kepler rejects non-elliptic eccentricity") {
  CHECK_THROWS_AS(solve_kepler(1.0, 1.0), UnsupportedOrbitError);
  CHECK_THROWS_AS(solve_kepler(1.0, -0.1), UnsupportedOrbitError);
}

TEST_CASE("circular orbit identities") {
  OrbitalElements el{1.3 * constants::kAu, 0.0, 0.2, 1.0, 0.5, 0.7, Epoch{100.0}};
  const CartesianState s = elements_to_state(el, el.epoch);
  CHECK(norm(s.r) == doctest::Approx(el.a).epsilon(1e-15));
  CHECK(norm(s.v) == doctest::Approx(std::sqrt(constants::kMuSun / el.a)).epsilon(1e-14));
}

TEST_CASE("elements_to_state is periodic and lies on the conic") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const OrbitalElements el = random_elements(rng, 0.95);
    const CartesianState s0 = elements_to_state(el, el.epoch);
    const double period_days = orbital_period(el.a) / constants::kSecondsPerDay;
    const CartesianState s1 = elements_to_state(el, Epoch{el.epoch.mjd2000 + period_days});
    REQUIRE(rel(s1.r, s0.r) < 1e-6);
    REQUIRE(rel(s1.v, s0.v) < 1e-6);
    const double energy = -constants::kMuSun / (2 * el.a);
    REQUIRE(std::abs(specific_energy(s0.r, s0.v) - energy) / std::abs(energy) < 1e-9);
    const double h = std::sqrt(constants::kMuSun * el.a * (1 - el.e * el.e));
    REQUIRE(std::abs(norm(angular_momentum(s0.r, s0.v)) - h) / h < 1e-9);
  }
}

TEST_CASE("elements_to_state rejects unsupported orbits") {
  OrbitalElements el = earth_like();
  el.e = 1.2;
  CHECK_THROWS_AS(elements_to_state(el, el.epoch), UnsupportedOrbitError);
  el.e = 1.0;
  CHECK_THROWS_AS(elements_to_state(el, el.epoch), UnsupportedOrbitError);
}

TEST_CASE("Earth-like ephemeris matches the integrator after 100 days") {
  const OrbitalElements el = earth_like();
  const Epoch t0{2000.0};
  const CartesianState s0 = elements_to_state(el, t0);
  const CartesianState ref = testing::integrate_two_body(s0, 100 * constants::kSecondsPerDay);
  const CartesianState s1 = elements_to_state(el, Epoch{2100.0});
  CHECK(rel(s1.r, ref.r) < 1e-9);
  CHECK(rel(s1.v, ref.v) < 1e-9);
}

TEST_CASE("state_to_elements inverts elements_to_state") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const OrbitalElements el = random_elements(rng);
    const CartesianState s = elements_to_state(el, Epoch{1500.0});
    const OrbitalElements back = state_to_elements(s);
    const CartesianState s2 = elements_to_state(back, Epoch{1500.0});
    REQUIRE(rel(s2.r, s.r) < 1e-9);
    REQUIRE(rel(s2.v, s.v) < 1e-9);
    REQUIRE(back.a == doctest::Approx(el.a).epsilon(1e-9));
  }
}

TEST_CASE("propagate identity and reversibility") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const CartesianState s = elements_to_state(random_elements(rng, 0.9), Epoch{1000.0});
    const CartesianState same = propagate(s, 0.0).state;
    REQUIRE(same.r == s.r);
    REQUIRE(same.v == s.v);
    std::uniform_real_distribution<double> dt(-800.0, 800.0);
    const double d = dt(rng) * constants::kSecondsPerDay;
    const CartesianState back = propagate(propagate(s, d).state, -d).state;
    REQUIRE(rel(back.r, s.r) < 1e-8);
    REQUIRE(rel(back.v, s.v) < 1e-8);
  }
}

TEST_CASE("propagate conserves energy and angular momentum") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> dt(-3000.0, 3000.0);
  for (int i = 0; i < 500; ++i) {
    const CartesianState s = elements_to_state(random_elements(rng, 0.97), Epoch{1000.0});
    const CartesianState p = propagate(s, dt(rng) * constants::kSecondsPerDay).state;
    const double e0 = specific_energy(s.r, s.v);
    REQUIRE(std::abs(specific_energy(p.r, p.v) - e0) / std::abs(e0) < 1e-9);
    const double h0 = norm(angular_momentum(s.r, s.v));
    REQUIRE(std::abs(norm(angular_momentum(p.r, p.v)) - h0) / h0 < 1e-9);
  }
}

TEST_CASE("propagate matches the integrator") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 20; ++i) {
    const CartesianState s = elements_to_state(random_elements(rng), Epoch{1000.0});
    const double dt = 37.5 * constants::kSecondsPerDay;
    const CartesianState p = propagate(s, dt).state;
    const CartesianState ref = testing::integrate_two_body(s, dt);
    REQUIRE(rel(p.r, ref.r) < 1e-9);
    REQUIRE(rel(p.v, ref.v) < 1e-9);
  }
  // Hyperbolic arc.
  const CartesianState h{{constants::kAu, 0, 0}, {0, 50000.0, 3000.0}, Epoch{0.0}};
  REQUIRE(specific_energy(h.r, h.v) > 0.0);
  const double dt = 60 * constants::kSecondsPerDay;
  const CartesianState p = propagate(h, dt).state;
  const CartesianState ref = testing::integrate_two_body(h, dt);
  CHECK(rel(p.r, ref.r) < 1e-9);
  CHECK(rel(p.v, ref.v) < 1e-9);
}

TEST_CASE("propagation commutes with advancing the mean anomaly") {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 200; ++i) {
    const OrbitalElements el = random_elements(rng, 0.9);
    const CartesianState s = elements_to_state(el, Epoch{800.0});
    const CartesianState a = elements_to_state(el, Epoch{873.25});
    const CartesianState b = propagate(s, 73.25 * constants::kSecondsPerDay).state;
    REQUIRE(rel(b.r, a.r) < 1e-8);
    REQUIRE(rel(b.v, a.v) < 1e-8);
  }
}

TEST_CASE("radius floor marks the arc infeasible") {
  // Eccentric orbit dipping to 0.1 AU at periapsis.
  OrbitalElements el{0.55 * constants::kAu, 0.8182, 0.1, 0.0, 0.0, kPi, Epoch{0.0}};
  const CartesianState apo = elements_to_state(el, el.epoch);
  const double half = 0.5 * orbital_period(el.a);
  CHECK_FALSE(propagate(apo, half, constants::kMuSun, 0.2 * constants::kAu).feasible);
  CHECK(propagate(apo, half, constants::kMuSun, 0.05 * constants::kAu).feasible);
  CHECK(propagate(apo, 0.1 * half, constants::kMuSun, 0.2 * constants::kAu).feasible);
}
