// Copyright 2026 The redres Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef REDRES_START_OPTIMIZER_H_
#define REDRES_START_OPTIMIZER_H_

#include <algorithm>
#include <climits>
#include <vector>

#include "redres/dp_planner.h"
#include "redres/path_model.h"

namespace redres {

// Forward-pass value for the start search: the earliest sample a path can
// have started from (freely, without a break being charged) and still
// reach the state. One pass per admitted break budget b; a break into
// step i falls back on the previous budget's best value at step i - 1.
struct EarliestStart {
  using Value = int;
  // Best value at every step of the pass with budget b - 1; empty for b = 0.
  const std::vector<int>* fallback = nullptr;

  Value Infinite() const { return INT_MAX; }
  Value Start() const { return 0; }
  Value Continue(Value prev, double /*step_cost*/) const { return prev; }
  Value Break(Value /*prev*/, int step) const {
    if (fallback == nullptr) return step;
    return std::min(step, (*fallback)[step - 1]);
  }
  bool Less(Value a, Value b) const { return a < b; }
  bool IsFinite(Value v) const { return v != INT_MAX; }
};

struct StartSearchResult {
  bool improved = false;
  // 0 unless improved.
  int new_start_index = 0;
  int baseline_breaks = 0;
  Plan baseline;
  // Re-based plan when improved, otherwise the baseline.
  Plan plan;
};

// For a circular path, finds the earliest start sample s in [1, n - 1]
// whose path s, ..., n, 1, ..., s needs one break fewer than the plan from
// sample 0, and returns the optimal plan for it. A start that saves a
// break is found whenever one exists. Throws std::invalid_argument for a
// non-circular path or a grid that does not match it.
StartSearchResult OptimizeStart(const SampledPath& path,
                                const ParamGrid& grid,
                                const JointLimits& limits,
                                const LossParams& lp,
                                const SolveOptions& options = {});

// Rows s..n followed by 1..s.
std::vector<int> StartRows(int n, int start_index);

// Relabels a plan of n + 1 samples so that sample i maps to original pose
// (start_index + i) mod n. Joints and break flags are kept; the loss is
// recomputed. Throws std::invalid_argument on a length mismatch.
Plan RebasePlan(const Plan& window, int start_index, int n,
                const LossParams& lp);

}  // namespace redres

#endif  // REDRES_START_OPTIMIZER_H_
