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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flyby/dp.hpp"

namespace flyby {

/// How sampled epochs are snapped to the step lattice. WorstCorner evaluates all
/// eight floor/ceil combinations of (t0, t1, t2) and keeps the largest error.
enum class RoundingMode { kWorstCorner, kNearest };

struct ErrorStatsConfig {
  RoundingMode rounding = RoundingMode::kWorstCorner;
  std::optional<double> origin;  // lattice origin, MJD2000; mission window start if unset
  LambertConfig lambert;
  int workers = 1;
};

struct LegErrorStats {
  std::size_t event = 0;  // flyby event index
  std::size_t samples = 0;
  double mean_abs_error = 0.0;  // m/s
  double max_abs_error = 0.0;
};

struct ErrorReport {
  double step = 0.0;  // days
  std::size_t samples = 0;
  double mean_abs_error = 0.0;
  double max_abs_error = 0.0;
  std::vector<LegErrorStats> per_leg;
};

/// Monte-Carlo rounding error of the flyby stage cost: for each flyby event draw
/// `samples` triples (t0, t1, t2) uniformly in the three event windows (ordered by
/// rejection), compare the cost at exact times with the cost at lattice-rounded
/// times. Deterministic for a given seed regardless of worker count.
ErrorReport leg_error_stats(const BodyCatalog& catalog, const Sequence& seq,
                            const MissionConstraints& constraints, double step_days,
                            std::size_t samples, std::uint64_t seed,
                            const ErrorStatsConfig& config = {});

/// step_days,samples,mean_abs_error_mps,max_abs_error_mps
std::string error_reports_csv(const std::vector<ErrorReport>& reports);

struct EpsEnumeration {
  double eps_max = 0.0;           // +inf when some rounding corner is infeasible
  std::vector<double> per_term;   // one per stage cost term
};

/// Exact eps_max of the coarse grid against the fine grid: every stage cost term
/// is evaluated at every admissible fine epoch tuple and at all floor/ceil coarse
/// roundings of it; the largest absolute difference is returned.
EpsEnumeration enumerate_eps_max(const BodyCatalog& catalog, const Sequence& seq,
                                 const MissionConstraints& constraints, const GridConfig& coarse,
                                 const GridConfig& fine);

BoundCertificate certify_bound(const Solution& solution, double eps_max, bool exact);

}  // namespace flyby
