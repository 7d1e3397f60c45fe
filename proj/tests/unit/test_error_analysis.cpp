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

#include "flyby/error_analysis.hpp"
#include "flyby/errors.hpp"
#include "support/synthetic.hpp"

using namespace flyby;
using flyby::testing::Instance;
using flyby::testing::random_instance;

namespace {

Instance flyby_chain(std::uint64_t seed, int legs) {
  std::mt19937_64 rng(seed);
  Instance inst = random_instance(rng, legs, 8, 20.0, 9, true, true);
  return inst;
}

}  // namespace

TEST_CASE("vanishing step gives vanishing error") {
  const Instance inst = flyby_chain(1, 3);
  const ErrorReport r = leg_error_stats(inst.catalog, inst.sequence, inst.constraints, 1e-9, 200, 7);
  CHECK(r.samples == 400);
  CHECK(r.per_leg.size() == 2);
  CHECK(r.max_abs_error < 1e-3);
}

TEST_CASE("statistics are reproducible and independent of the worker count") {
  const Instance inst = flyby_chain(2, 3);
  ErrorStatsConfig one, many;
  many.workers = 4;
  const ErrorReport a = leg_error_stats(inst.catalog, inst.sequence, inst.constraints, 1.0, 300, 42, one);
  const ErrorReport b = leg_error_stats(inst.catalog, inst.sequence, inst.constraints, 1.0, 300, 42, many);
  const ErrorReport c = leg_error_stats(inst.catalog, inst.sequence, inst.constraints, 1.0, 300, 43, one);
  CHECK(a.mean_abs_error == b.mean_abs_error);
  CHECK(a.max_abs_error == b.max_abs_error);
  CHECK(error_reports_csv({a}) == error_reports_csv({b}));
  CHECK(a.mean_abs_error != c.mean_abs_error);
}

TEST_CASE("error shrinks with the step") {
  for (std::uint64_t seed : {3u, 4u, 5u}) {
    const Instance inst = flyby_chain(seed, 4);
    double previous = std::numeric_limits<double>::infinity();
    for (double step : {10.0, 1.0, 0.1, 0.01}) {
      for (RoundingMode mode : {RoundingMode::kWorstCorner, RoundingMode::kNearest}) {
        ErrorStatsConfig cfg;
        cfg.rounding = mode;
        const ErrorReport r = leg_error_stats(inst.catalog, inst.sequence, inst.constraints, step, 300, seed, cfg);
        REQUIRE(r.mean_abs_error >= 0.0);
        REQUIRE(r.mean_abs_error <= r.max_abs_error);
        for (const auto& leg : r.per_leg) REQUIRE(leg.mean_abs_error <= leg.max_abs_error);
        if (mode == RoundingMode::kWorstCorner) {
          REQUIRE(r.mean_abs_error < previous);
          previous = r.mean_abs_error;
        }
      }
    }
  }
}

TEST_CASE("worst-corner rounding dominates nearest rounding") {
  const Instance inst = flyby_chain(6, 3);
  ErrorStatsConfig nearest;
  nearest.rounding = RoundingMode::kNearest;
  const ErrorReport w = leg_error_stats(inst.catalog, inst.sequence, inst.constraints, 2.0, 500, 9);
  const ErrorReport n = leg_error_stats(inst.catalog, inst.sequence, inst.constraints, 2.0, 500, 9, nearest);
  CHECK(w.mean_abs_error >= n.mean_abs_error);
}

TEST_CASE("error statistics input checks") {
  const Instance inst = flyby_chain(7, 3);
  CHECK_THROWS_AS(leg_error_stats(inst.catalog, inst.sequence, inst.constraints, 0.0, 10, 1), InputError);
  CHECK_THROWS_AS(leg_error_stats(inst.catalog, inst.sequence, inst.constraints, 1.0, 0, 1), InputError);
  const Instance one_leg = flyby_chain(7, 1);
  CHECK_THROWS_AS(leg_error_stats(one_leg.catalog, one_leg.sequence, one_leg.constraints, 1.0, 10, 1), InputError);
  const std::string csv = error_reports_csv({});
  CHECK(csv == "step_days,samples,mean_abs_error_mps,max_abs_error_mps\n");
}

TEST_CASE("bound certificate") {
  Solution s;
  s.events.resize(36);
  s.total_dv = 13944.8;
  const BoundCertificate zero = certify_bound(s, 0.0, true);
  CHECK(zero.bound == 0.0);
  CHECK(zero.statement == "solution is continuous-optimal");
  const BoundCertificate est = certify_bound(s, 8.14, false);
  CHECK(est.stages == 35);
  CHECK(est.bound == doctest::Approx(284.9));
  CHECK(est.statement.find("estimated") != std::string::npos);
  CHECK_THROWS_AS(certify_bound(s, -1.0, true), InputError);
  s.events.resize(1);
  CHECK_THROWS_AS(certify_bound(s, 1.0, true), InputError);
}

TEST_CASE("identical grids enumerate to zero error") {
  const Instance inst = flyby_chain(8, 2);
  const EpsEnumeration e = enumerate_eps_max(inst.catalog, inst.sequence, inst.constraints, inst.grid, inst.grid);
  CHECK(e.eps_max == 0.0);
  CHECK(e.per_term.size() == 2);
}

TEST_CASE("enumerated eps_max bounds the coarse optimum") {
  int certified = 0;
  for (std::uint64_t seed = 10; seed < 40; ++seed) {
    std::mt19937_64 rng(seed);
    const int legs = 1 + static_cast<int>(seed % 3);
    Instance inst = random_instance(rng, legs, 4, 8.0, 5, seed % 2 == 0, true);
    GridConfig coarse = inst.grid;
    GridConfig fine = inst.grid;
    fine.step_days = 2.0;
    const EpsEnumeration e = enumerate_eps_max(inst.catalog, inst.sequence, inst.constraints, coarse, fine);
    REQUIRE(e.per_term.size() == static_cast<std::size_t>(legs));
    if (!std::isfinite(e.eps_max)) continue;
    double j_coarse, j_fine;
    try {
      j_fine = solve_bi_impulse(inst.catalog, inst.sequence, inst.constraints, fine).total_dv;
      j_coarse = solve_bi_impulse(inst.catalog, inst.sequence, inst.constraints, coarse).total_dv;
    } catch (const NoSolutionError&) {
      continue;
    }
    REQUIRE(j_fine <= j_coarse);
    REQUIRE(j_coarse <= j_fine + legs * e.eps_max + 1e-9);
    ++certified;
  }
  CHECK(certified >= 10);
}
