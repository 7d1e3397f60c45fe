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
#include "flyby/lambert.hpp"

using namespace flyby;
using constants::kAu;
using constants::kMuSun;
using constants::kPi;

namespace {

Vec3 on_circle(double r, double angle) { return {r * std::cos(angle), r * std::sin(angle), 0.0}; }

double residual(const Vec3& r1, const Vec3& v1, const Vec3& r2, double tof) {
  return norm(propagate({r1, v1, Epoch{0.0}}, tof).state.r - r2);
}

struct RandomQuery {
  Vec3 r1, r2;
  double tof;
};

RandomQuery random_query(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> rad(0.6, 3.0), ang(0.0, 2 * kPi), z(-0.3, 0.3), days(20.0, 600.0);
  for (;;) {
    const Vec3 r1 = on_circle(rad(rng) * kAu, ang(rng)) + Vec3{0, 0, z(rng) * kAu};
    const Vec3 r2 = on_circle(rad(rng) * kAu, ang(rng)) + Vec3{0, 0, z(rng) * kAu};
    const double c = dot(r1, r2) / (norm(r1) * norm(r2));
    if (c < std::cos(179.0 * constants::kDeg) || c > std::cos(0.5 * constants::kDeg)) continue;
    return {r1, r2, days(rng) * constants::kSecondsPerDay};
  }
}

// Euler's time on the prograde parabola through r1, r2.
double parabolic_time(const Vec3& r1, const Vec3& r2) {
  const double c = norm(r2 - r1);
  const double s = 0.5 * (norm(r1) + norm(r2) + c);
  const double sign = cross(r1, r2).z >= 0.0 ? 1.0 : -1.0;
  return std::sqrt(2.0 / kMuSun) / 3.0 * (std::pow(s, 1.5) - sign * std::pow(s - c, 1.5));
}

}  // namespace

TEST_CASE("quarter circular arc reproduces circular velocities") {
  const double a = 1.2 * kAu;
  const Vec3 r1 = on_circle(a, 0.3);
  const Vec3 r2 = on_circle(a, 0.3 + kPi / 2);
  const double tof = orbital_period(a) / 4;
  const auto arcs = solve_lambert({r1, r2, tof, Direction::kPrograde, 0});
  REQUIRE(arcs.size() == 1);
  const double vc = std::sqrt(kMuSun / a);
  CHECK(norm(arcs[0].v1) == doctest::Approx(vc).epsilon(1e-9));
  CHECK(norm(arcs[0].v2) == doctest::Approx(vc).epsilon(1e-9));
  CHECK(std::abs(dot(arcs[0].v1, r1)) / (vc * a) < 1e-9);
  CHECK(std::abs(dot(arcs[0].v2, r2)) / (vc * a) < 1e-9);
  CHECK(arcs[0].branch == Branch::kSingle);
}

TEST_CASE("time reversal symmetry") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 100; ++i) {
    const RandomQuery q = random_query(rng);
    const auto fwd = solve_lambert({q.r1, q.r2, q.tof, Direction::kPrograde, 0});
    const auto rev = solve_lambert({q.r2, q.r1, q.tof, Direction::kRetrograde, 0});
    REQUIRE(fwd.size() == 1);
    REQUIRE(rev.size() == 1);
    REQUIRE(norm(rev[0].v1 + fwd[0].v2) < 1e-6 * norm(fwd[0].v2));
    REQUIRE(norm(rev[0].v2 + fwd[0].v1) < 1e-6 * norm(fwd[0].v1));
  }
}

TEST_CASE("arcs reach the target under propagation") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 2000; ++i) {
    const RandomQuery q = random_query(rng);
    for (auto dir : {Direction::kPrograde, Direction::kRetrograde}) {
      const auto arcs = solve_lambert({q.r1, q.r2, q.tof, dir, 0});
      REQUIRE(arcs.size() == 1);
      REQUIRE(residual(q.r1, arcs[0].v1, q.r2, q.tof) < 1.0);
      const double h = angular_momentum(q.r1, arcs[0].v1).z;
      REQUIRE((dir == Direction::kPrograde ? h > 0 : h < 0));
    }
  }
}

TEST_CASE("80-day elliptic leg") {
  const Vec3 r1{1.0 * kAu, 0.1 * kAu, 0.01 * kAu};
  const Vec3 r2{-0.3 * kAu, 1.2 * kAu, -0.05 * kAu};
  const double tof = 80 * constants::kSecondsPerDay;
  const auto arcs = solve_lambert({r1, r2, tof, Direction::kPrograde, 0});
  REQUIRE(arcs.size() == 1);
  CHECK(residual(r1, arcs[0].v1, r2, tof) < 1.0);
}

TEST_CASE("terminal velocities share one conic") {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 1000; ++i) {
    const RandomQuery q = random_query(rng);
    const auto arc = solve_lambert({q.r1, q.r2, q.tof, Direction::kPrograde, 0}).at(0);
    const double e1 = specific_energy(q.r1, arc.v1);
    const double e2 = specific_energy(q.r2, arc.v2);
    REQUIRE(std::abs(e1 - e2) <= 1e-9 * std::max(std::abs(e1), kMuSun / norm(q.r1) * 1e-3));
  }
}

TEST_CASE("multi-revolution branches") {
  std::mt19937_64 rng(31);
  int pairs = 0;
  for (int i = 0; i < 300; ++i) {
    RandomQuery q = random_query(rng);
    q.tof *= 4;
    for (int n = 1; n <= 3; ++n) {
      const auto arcs = solve_lambert({q.r1, q.r2, q.tof, Direction::kPrograde, n});
      REQUIRE((arcs.empty() || arcs.size() == 2));
      const double t_min = min_energy_tof(q.r1, q.r2, n);
      if (q.tof > t_min * (1 + 1e-6)) REQUIRE(arcs.size() == 2);
      if (q.tof < t_min * (1 - 1e-6)) REQUIRE(arcs.empty());
      for (const auto& a : arcs) {
        REQUIRE(a.revolutions == n);
        REQUIRE(residual(q.r1, a.v1, q.r2, q.tof) < 1.0);
      }
      if (arcs.size() == 2) {
        ++pairs;
        REQUIRE(arcs[0].branch != arcs[1].branch);
      }
    }
  }
  CHECK(pairs > 50);
}

TEST_CASE("near-opposite geometry is ill-conditioned") {
  const Vec3 r1 = on_circle(kAu, 0.0);
  const Vec3 r2 = on_circle(1.3 * kAu, kPi - 0.05 * constants::kDeg);
  CHECK_THROWS_AS(solve_lambert({r1, r2, 1e7, Direction::kPrograde, 0}), IllConditionedGeometry);
  CHECK_THROWS_AS(solve_lambert({r1, r1 * 1.5, 1e7, Direction::kPrograde, 0}), IllConditionedGeometry);
  const Vec3 r3 = on_circle(1.3 * kAu, kPi - 0.2 * constants::kDeg);
  CHECK_NOTHROW(solve_lambert({r1, r3, 1e7, Direction::kPrograde, 0}));
}

TEST_CASE("invalid queries") {
  const Vec3 r1 = on_circle(kAu, 0.0), r2 = on_circle(kAu, 1.0);
  CHECK_THROWS_AS(solve_lambert({r1, r2, 0.0, Direction::kPrograde, 0}), InputError);
  CHECK_THROWS_AS(solve_lambert({r1, r2, -5.0, Direction::kPrograde, 0}), InputError);
  CHECK_THROWS_AS(solve_lambert({r1, r2, 1e6, Direction::kPrograde, -1}), InputError);
}

TEST_CASE("zero-revolution bound is the parabolic time") {
  std::mt19937_64 rng(37);
  for (int i = 0; i < 200; ++i) {
    const RandomQuery q = random_query(rng);
    const double tp = min_energy_tof(q.r1, q.r2, 0, Direction::kPrograde);
    REQUIRE(tp == doctest::Approx(parabolic_time(q.r1, q.r2)).epsilon(1e-9));
    // The conic switches from hyperbolic to elliptic across the bound.
    const auto fast = solve_lambert({q.r1, q.r2, tp * 0.999, Direction::kPrograde, 0}).at(0);
    const auto slow = solve_lambert({q.r1, q.r2, tp * 1.001, Direction::kPrograde, 0}).at(0);
    REQUIRE(specific_energy(q.r1, fast.v1) > 0.0);
    REQUIRE(specific_energy(q.r1, slow.v1) < 0.0);
  }
}

TEST_CASE("multi-revolution bound matches solver feasibility") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 50; ++i) {
    const RandomQuery q = random_query(rng);
    for (int n = 1; n <= 2; ++n) {
      const double bound = min_energy_tof(q.r1, q.r2, n);
      double lo = bound * 0.5, hi = bound * 2.0;
      REQUIRE(solve_lambert({q.r1, q.r2, lo, Direction::kPrograde, n}).empty());
      REQUIRE(!solve_lambert({q.r1, q.r2, hi, Direction::kPrograde, n}).empty());
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (solve_lambert({q.r1, q.r2, mid, Direction::kPrograde, n}).empty()) lo = mid; else hi = mid;
      }
      REQUIRE(hi == doctest::Approx(bound).epsilon(1e-6));
    }
    REQUIRE(min_energy_tof(q.r1, q.r2, 2) > min_energy_tof(q.r1, q.r2, 1));
  }
}

TEST_CASE("quarter-period arc exists above the zero-revolution bound") {
  const double a = kAu;
  const Vec3 r1 = on_circle(a, 0.0), r2 = on_circle(a, kPi / 2);
  CHECK(min_energy_tof(r1, r2, 0) < orbital_period(a) / 4);
}
