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

#include "flyby/refine.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "flyby/errors.hpp"

namespace flyby {

void validate_refine_config(const RefineConfig& c) {
  if (!(c.final_step > 0.0) || !std::isfinite(c.final_step)) throw InputError("final_step must be positive");
  if (!(c.initial_step >= c.final_step) || !std::isfinite(c.initial_step)) {
    throw InputError("initial_step must be at least final_step");
  }
  if (!(c.step_factor > 1.0) || !std::isfinite(c.step_factor)) throw InputError("step_factor must exceed 1");
  if (c.tube_half_width < 1) throw InputError("tube_half_width must be at least 1");
}

Solution refine(const BodyCatalog& catalog, const Sequence& seq, const MissionConstraints& constraints,
                const GridConfig& base, const RefineConfig& config) {
  validate_refine_config(config);
  using clock = std::chrono::steady_clock;

  GridConfig grid = base;
  grid.step_days = config.initial_step;
  auto t0 = clock::now();
  Solution best = solve_bi_impulse(catalog, seq, constraints, grid);
  std::vector<RefineStep> history{
      {grid.step_days, best.total_dv, std::chrono::duration<double>(clock::now() - t0).count()}};

  double step = config.initial_step;
  while (step > config.final_step) {
    const double prev_step = step;
    step = std::max(config.final_step, step / config.step_factor);
    const double half = config.tube_half_width * prev_step;
    const std::vector<double> incumbent = best.epochs();

    GridConfig next = base;
    next.step_days = step;
    next.stage_windows.assign(incumbent.size(), std::nullopt);
    next.pinned_epochs.assign(incumbent.size(), {});
    for (std::size_t k = 0; k < incumbent.size(); ++k) {
      TimeWindow w{incumbent[k] - half, incumbent[k] + half};
      if (k < base.stage_windows.size() && base.stage_windows[k]) {
        w.lo = std::max(w.lo, base.stage_windows[k]->lo);
        w.hi = std::min(w.hi, base.stage_windows[k]->hi);
      }
      next.stage_windows[k] = w;
      next.pinned_epochs[k] = {incumbent[k]};
      if (k < base.pinned_epochs.size()) {
        next.pinned_epochs[k].insert(next.pinned_epochs[k].end(), base.pinned_epochs[k].begin(),
                                     base.pinned_epochs[k].end());
      }
    }

    t0 = clock::now();
    Solution candidate = solve_bi_impulse(catalog, seq, constraints, next);
    const double seconds = std::chrono::duration<double>(clock::now() - t0).count();
    if (candidate.total_dv > best.total_dv) {
      throw InternalError("refinement lost the incumbent: " + std::to_string(candidate.total_dv) +
                          " > " + std::to_string(best.total_dv) + " m/s");
    }
    best = std::move(candidate);
    history.push_back({step, best.total_dv, seconds});
  }
  best.refinement = std::move(history);
  return best;
}

std::string refine_history_csv(const std::vector<RefineStep>& history) {
  std::ostringstream os;
  os << std::setprecision(12) << "step_days,total_dv_mps,seconds\n";
  for (const auto& h : history) os << h.step_days << ',' << h.total_dv << ',' << h.seconds << '\n';
  return os.str();
}

}  // namespace flyby
