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

#include <string>
#include <vector>

#include "flyby/dp.hpp"

namespace flyby {

struct RefineConfig {
  double initial_step = 32.0;  // days
  double step_factor = 2.0;
  int tube_half_width = 2;  // in units of the previous step
  double final_step = 0.01;  // days
};

void validate_refine_config(const RefineConfig& config);

/// Adaptive step technique: solve on the full grid, then repeatedly shrink every
/// event window to a tube around the incumbent epochs and divide the step. The
/// incumbent epochs are pinned into each finer grid, so iterates never get worse.
/// This is a heuristic; only the first solve is globally optimal on its grid.
Solution refine(const BodyCatalog& catalog, const Sequence& seq, const MissionConstraints& constraints,
                const GridConfig& base, const RefineConfig& config);

/// step_days,total_dv_mps,seconds
std::string refine_history_csv(const std::vector<RefineStep>& history);

}  // namespace flyby
