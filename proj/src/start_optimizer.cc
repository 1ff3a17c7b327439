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

#include "redres/start_optimizer.h"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "dp_engine.h"

namespace redres {

std::vector<int> StartRows(int n, int start_index) {
  if (n < 1 || start_index < 0 || start_index > n) {
    throw std::invalid_argument("start index outside [0, n]");
  }
  std::vector<int> rows;
  rows.reserve(n + 1);
  for (int r = start_index; r <= n; ++r) rows.push_back(r);
  for (int r = 1; r <= start_index; ++r) rows.push_back(r);
  return rows;
}

Plan RebasePlan(const Plan& window, int start_index, int n,
                const LossParams& lp) {
  if (window.n() != n || static_cast<int>(window.cont.size()) != n + 1) {
    throw std::invalid_argument("window must hold exactly n + 1 samples");
  }
  if (start_index < 0 || start_index > n) {
    throw std::invalid_argument("start index outside [0, n]");
  }
  Plan out = window;
  out.cont[0] = true;
  out.pose_index.resize(n + 1);
  for (int i = 0; i <= n; ++i) out.pose_index[i] = (start_index + i) % n;
  out.loss = PlanLoss(out, lp.big_m);
  out.breakpoints =
      static_cast<int>(std::count(out.cont.begin() + 1, out.cont.end(), false));
  return out;
}

StartSearchResult OptimizeStart(const SampledPath& path,
                                const ParamGrid& grid,
                                const JointLimits& limits,
                                const LossParams& lp,
                                const SolveOptions& options) {
  if (!path.circular) {
    throw std::invalid_argument("start optimization needs a circular path");
  }
  const int n = grid.n();
  if (path.n() != n) throw std::invalid_argument("grid does not match path");
  StartSearchResult result;
  result.baseline = Solve(grid, limits, lp, options);
  result.baseline_breaks = result.baseline.breakpoints;
  result.plan = result.baseline;
  const int z = result.baseline_breaks;
  if (z == 0 || n < 2) return result;

  // Sample s + n of the doubled path is reachable with at most b breaks
  // from a free start at or before s exactly when the rotation starting at
  // s needs at most b breaks: the tail of such a path is a plan for it.
  SolveOptions search = options;
  search.pinned_start.reset();
  using Engine = internal::DpEngine<EarliestStart>;
  std::vector<int> previous;
  int hit = -1;
  for (int b = 0; b < z && hit < 0; ++b) {
    std::vector<int> best(2 * n + 1, INT_MAX);
    best[0] = 0;
    EarliestStart policy{b == 0 ? nullptr : &previous};
    Engine engine(grid, DoubledRows(n), limits, lp.t0, policy, search);
    const bool last = b == z - 1;
    engine.Run([&](int i, const Engine& e) {
      best[i] = e.best_value();
      if (last && i > n && best[i] <= i - n) {
        hit = i - n;
        return true;
      }
      return i >= 2 * n - 1;
    });
    previous = std::move(best);
  }
  if (hit < 0) return result;

  const DpTables tables =
      SolveTables(grid, StartRows(n, hit), limits, lp, search);
  const Plan plan = Backtrack(tables, grid, lp);
  if (plan.breakpoints != z - 1) {
    throw std::logic_error("start " + std::to_string(hit) + " gives " +
                           std::to_string(plan.breakpoints) +
                           " breaks, expected " + std::to_string(z - 1));
  }
  result.improved = true;
  result.new_start_index = hit;
  result.plan = RebasePlan(plan, hit, n, lp);
  return result;
}

}  // namespace redres
