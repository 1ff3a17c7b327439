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
#include <climits>
#include <random>

#include <gtest/gtest.h>

#include "redres/sim_validator.h"
#include "test_support.h"

namespace redres {
namespace {

using testing::HasEmptyRow;
using testing::RandomTinyInstance;
using testing::RotateGrid;

SampledPath CircularStub(int n) {
  SampledPath path;
  path.t0 = testing::kTinyT0;
  path.poses.assign(n + 1, Pose::Identity());
  path.circular = true;
  return path;
}

TEST(StartOptimizerTest, AgreesWithRotationSearch) {
  std::mt19937_64 rng(41);
  int improved = 0, checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 3 + trial % 6;
    const int m = 2 + trial % 4;
    auto inst = RandomTinyInstance(rng, n, m, 0.75, true);
    if (HasEmptyRow(inst.grid)) continue;
    ++checked;
    std::vector<int> breaks(n);
    for (int s = 0; s < n; ++s) {
      breaks[s] =
          Solve(RotateGrid(inst.grid, s), inst.limits, inst.lp).breakpoints;
    }
    const int best = *std::min_element(breaks.begin(), breaks.end());
    const StartSearchResult r =
        OptimizeStart(CircularStub(n), inst.grid, inst.limits, inst.lp);
    ASSERT_EQ(r.baseline_breaks, breaks[0]) << "trial " << trial;
    ASSERT_GE(best, breaks[0] - 1) << "trial " << trial;
    ASSERT_EQ(r.improved, best < breaks[0]) << "trial " << trial;
    if (!r.improved) {
      EXPECT_EQ(r.new_start_index, 0);
      EXPECT_EQ(r.plan.indices, r.baseline.indices);
      continue;
    }
    ++improved;
    const int s = r.new_start_index;
    ASSERT_GE(s, 1);
    ASSERT_LT(s, n);
    EXPECT_EQ(breaks[s], breaks[0] - 1);
    // Earliest qualifying start.
    for (int t = 1; t < s; ++t) EXPECT_GE(breaks[t], breaks[0]);
    EXPECT_EQ(r.plan.breakpoints, breaks[0] - 1);
    // The re-based plan is a valid plan on the rotated path.
    const ParamGrid rotated = RotateGrid(inst.grid, s);
    ASSERT_EQ(r.plan.n(), n);
    for (int i = 0; i <= n; ++i) {
      EXPECT_EQ(r.plan.pose_index[i], (s + i) % n);
      ASSERT_TRUE(rotated.present(i, r.plan.indices[i]));
      EXPECT_EQ(r.plan.joints[i], rotated.config(i, r.plan.indices[i]));
    }
    EXPECT_TRUE(CheckPlan(r.plan, inst.limits).empty());
    EXPECT_EQ(r.plan.loss, PlanLoss(r.plan, inst.lp.big_m));
  }
  EXPECT_GT(checked, 100);
  EXPECT_GT(improved, 10);
}

TEST(StartOptimizerTest, RejectsOpenOrMismatchedPaths) {
  std::mt19937_64 rng(42);
  auto inst = RandomTinyInstance(rng, 4, 3, 1.0, true);
  SampledPath open = CircularStub(4);
  open.circular = false;
  EXPECT_THROW(OptimizeStart(open, inst.grid, inst.limits, inst.lp),
               std::invalid_argument);
  EXPECT_THROW(OptimizeStart(CircularStub(5), inst.grid, inst.limits, inst.lp),
               std::invalid_argument);
}

TEST(StartOptimizerTest, NothingToImproveWithoutBreaks) {
  ParamGrid grid({0.0, 0.05}, 5);
  for (int i = 0; i <= 4; ++i) grid.Set(i, 0, JointConfig::Zero());
  const JointLimits l = testing::TinyLimits();
  const LossParams lp =
      MakeLossParams(AutoPenalty(4, l), testing::kTinyT0, 4, l);
  const StartSearchResult r = OptimizeStart(CircularStub(4), grid, l, lp);
  EXPECT_FALSE(r.improved);
  EXPECT_EQ(r.new_start_index, 0);
  EXPECT_EQ(r.baseline_breaks, 0);
  EXPECT_EQ(r.plan.indices, r.baseline.indices);
}

TEST(EarliestStartTest, BreaksFallBackOnTheSmallerBudget) {
  EarliestStart free;
  EXPECT_EQ(free.Start(), 0);
  EXPECT_EQ(free.Continue(3, 0.7), 3);
  EXPECT_EQ(free.Break(0, 5), 5);
  const std::vector<int> previous = {0, 0, 2, INT_MAX};
  EarliestStart budget{&previous};
  EXPECT_EQ(budget.Break(9, 2), 0);
  EXPECT_EQ(budget.Break(9, 3), 2);
  EXPECT_EQ(budget.Break(9, 4), 4);
  EXPECT_FALSE(budget.IsFinite(budget.Infinite()));
}

TEST(RebaseTest, Relabels) {
  Plan window;
  window.t0 = 0.1;
  for (int i = 0; i <= 4; ++i) {
    window.joints.push_back(JointConfig::Constant(0.01 * i));
    window.indices.push_back(i % 3);
    window.cont.push_back(i != 3);
    window.pose_index.push_back(i);
  }
  const LossParams lp{100.0, 0.1};
  const Plan rebased = RebasePlan(window, 3, 4, lp);
  EXPECT_EQ(rebased.pose_index, (std::vector<int>{3, 0, 1, 2, 3}));
  EXPECT_EQ(rebased.breakpoints, 1);
  EXPECT_EQ(rebased.loss, PlanLoss(rebased, 100.0));
  EXPECT_EQ(rebased.joints, window.joints);
  EXPECT_THROW(RebasePlan(window, 3, 5, lp), std::invalid_argument);
  const Plan same = RebasePlan(window, 0, 4, lp);
  EXPECT_EQ(same.pose_index, (std::vector<int>{0, 1, 2, 3, 0}));
}

TEST(RebaseTest, StartRows) {
  EXPECT_EQ(StartRows(4, 0), (std::vector<int>{0, 1, 2, 3, 4}));
  EXPECT_EQ(StartRows(4, 3), (std::vector<int>{3, 4, 1, 2, 3}));
  EXPECT_THROW(StartRows(4, 5), std::invalid_argument);
}

}  // namespace
}  // namespace redres
