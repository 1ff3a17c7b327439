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

#include "redres/sim_validator.h"

#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "test_support.h"

namespace redres {
namespace {

using testing::HasEmptyRow;
using testing::kTinyT0;
using testing::RandomTinyInstance;

struct Fixture {
  RobotModel model = DefaultRobotModel();
  SampledPath path;
  Plan plan;
};

const Fixture& SmallPath1() {
  static const Fixture f = [] {
    Fixture out;
    PathSpec spec;
    spec.analytic = AnalyticPath::kTest1;
    spec.t0 = 0.1;
    out.path = SamplePath(spec);
    const ParamGrid grid = BuildParamGrid(out.path, 400, out.model);
    const LossParams lp =
        MakeLossParams(AutoPenalty(out.path.n(), out.model.limits), spec.t0,
                       out.path.n(), out.model.limits);
    out.plan = Solve(grid, out.model.limits, lp);
    return out;
  }();
  return f;
}

TEST(BruteForceTest, AgreesWithPlanner) {
  std::mt19937_64 rng(31);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 5;
    const int m = 2 + (trial / 5) % 4;
    auto inst = RandomTinyInstance(rng, n, m, 0.8);
    if (HasEmptyRow(inst.grid)) continue;
    const Plan dp = Solve(inst.grid, inst.limits, inst.lp);
    const Plan bf = BruteForceSolve(inst.grid, inst.limits, inst.lp);
    ASSERT_EQ(dp.loss, bf.loss) << "trial " << trial;
    ASSERT_EQ(dp.indices, bf.indices) << "trial " << trial;
    ASSERT_EQ(dp.cont, bf.cont) << "trial " << trial;
    ++checked;
  }
  EXPECT_GT(checked, 150);
}

TEST(BruteForceTest, RefusesLargeInstances) {
  std::mt19937_64 rng(32);
  auto inst = RandomTinyInstance(rng, 7, 8, 1.0);
  EXPECT_THROW(BruteForceSolve(inst.grid, inst.limits, inst.lp),
               std::invalid_argument);
}

TEST(CheckPlanTest, PlannerOutputIsClean) {
  const Fixture& f = SmallPath1();
  EXPECT_EQ(f.plan.breakpoints, 0);
  EXPECT_TRUE(CheckPlan(f.plan, f.model.limits).empty());
}

TEST(CheckPlanTest, FindsInjectedFaults) {
  const Fixture& f = SmallPath1();
  Plan bad = f.plan;
  bad.joints[40][2] += 0.3;
  const auto v = CheckPlan(bad, f.model.limits);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v.front().record, 40);
  EXPECT_EQ(v.front().joint, 2);
  Plan out_of_range = f.plan;
  out_of_range.joints[7][3] = 0.5;
  bool saw_q = false;
  for (const auto& x : CheckPlan(out_of_range, f.model.limits)) {
    saw_q = saw_q || (x.kind == 'q' && x.record == 7 && x.joint == 3);
  }
  EXPECT_TRUE(saw_q);
}

TEST(ValidateTest, FollowedPlanHasNoViolations) {
  const Fixture& f = SmallPath1();
  const Trace trace = Replay(f.plan, f.model, 0.001);
  const ConstraintReport report =
      ValidateConstraints(trace.stream, f.model.limits);
  EXPECT_TRUE(report.violations.empty());
  EXPECT_LE(report.terminal_v, 1e-9);
  EXPECT_LE(report.terminal_a, 1e-9);
  EXPECT_GE(report.cycles, 10000);
  // Extrema may sit on a bound up to the differencing round-off.
  for (int c = 0; c < kNumJoints; ++c) {
    EXPECT_LE(report.v_max_norm[c], 1.0 + 1e-8);
    EXPECT_GE(report.v_min_norm[c], -1.0 - 1e-8);
    EXPECT_LE(report.j_max_norm[c], 1.0 + 1e-8);
    EXPECT_GE(report.j_min_norm[c], -1.0 - 1e-8);
  }
  std::ostringstream out;
  WriteConstraintReport(report, out);
  EXPECT_NE(out.str().find("violations=0"), std::string::npos);
}

TEST(ValidateTest, FindsInjectedJerk) {
  const Fixture& f = SmallPath1();
  Stream stream = Replay(f.plan, f.model, 0.001).stream;
  stream.records[5000].state.q[0] += 1e-5;
  const auto report = ValidateConstraints(stream, f.model.limits);
  ASSERT_FALSE(report.violations.empty());
  bool saw_j = false;
  for (const auto& v : report.violations) {
    EXPECT_EQ(v.joint, 0);
    EXPECT_GE(v.record, 5000);
    EXPECT_LE(v.record, 5003);
    saw_j = saw_j || v.kind == 'j';
  }
  EXPECT_TRUE(saw_j);
}

TEST(ValidateTest, FindsPositionAndTerminalFaults) {
  const Fixture& f = SmallPath1();
  Stream stream = Replay(f.plan, f.model, 0.001).stream;
  const double top = f.model.limits.q_max[5];
  for (auto& r : stream.records) r.state.q[5] = top + 0.01;
  const auto report = ValidateConstraints(stream, f.model.limits);
  ASSERT_FALSE(report.violations.empty());
  EXPECT_EQ(report.violations.front().kind, 'q');

  Stream moving = Replay(f.plan, f.model, 0.001).stream;
  moving.records.back().state.q[1] += 1e-12;
  EXPECT_GT(ValidateConstraints(moving, f.model.limits).terminal_v, 1e-10);
}

TEST(ErrorTest, TrackingErrorIsSmall) {
  const Fixture& f = SmallPath1();
  const Trace trace = Replay(f.plan, f.model, 0.001);
  const ErrorStats e = CartesianError(trace, f.path);
  ASSERT_EQ(e.translation.size(), f.path.poses.size());
  EXPECT_LT(e.mean, 1e-4);
  EXPECT_LE(e.mean, e.max);
  // The first sample is met exactly at rest.
  EXPECT_LT(e.translation.front(), 1e-12);
  const ErrorStats exact = PlanError(f.plan, f.path, f.model);
  EXPECT_LT(exact.max, 1e-9);
  EXPECT_LT(exact.rotation_max, 1e-9);
}

TEST(ErrorTest, CsvWriters) {
  const Fixture& f = SmallPath1();
  const Trace trace = Replay(f.plan, f.model, 0.001);
  std::ostringstream stream_csv, error_csv;
  WriteStreamCsv(trace.stream, stream_csv);
  WriteErrorCsv(CartesianError(trace, f.path), error_csv);
  EXPECT_EQ(stream_csv.str().rfind("cycle,t,q1,q2,q3,q4,q5,q6,q7\n", 0), 0u);
  EXPECT_EQ(error_csv.str().rfind("i,translation,rotation\n", 0), 0u);
}

// A grid where the locally nearest step at sample 1 leads into a dead end.
TEST(GreedyTest, HaltsWhereThePlannerLooksAhead) {
  ParamGrid grid({0.0, 0.05}, 3);
  JointConfig q = JointConfig::Zero();
  grid.Set(0, 0, q);
  grid.Set(1, 0, q);
  q[6] = 0.05;
  q[0] = 0.08;
  grid.Set(1, 1, q);
  q[0] = 0.16;
  grid.Set(2, 1, q);
  const JointLimits l = testing::TinyLimits();
  const GreedyResult greedy = GreedyBaseline(grid, l, kTinyT0, 0);
  EXPECT_FALSE(greedy.completed);
  EXPECT_EQ(greedy.halted_at, 2);
  EXPECT_EQ(greedy.plan.n(), 1);
  const Plan dp =
      Solve(grid, l, MakeLossParams(AutoPenalty(2, l), kTinyT0, 2, l));
  EXPECT_EQ(dp.breakpoints, 0);
  EXPECT_EQ(dp.indices, (std::vector<int>{0, 1, 1}));
}

TEST(GreedyTest, CompletedRunCostsAtLeastThePlan) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> jitter(-0.01, 0.01);
  std::bernoulli_distribution keep(0.85);
  const JointLimits l = testing::TinyLimits();
  int completed = 0;
  for (int trial = 0; trial < 200; ++trial) {
    // Slow ramp in every joint plus jitter well inside a_max t0^2.
    ParamGrid grid({0.0, 0.05, 0.1, 0.15, 0.2}, 9);
    for (int i = 0; i <= 8; ++i) {
      for (int j = 0; j < 5; ++j) {
        if (!keep(rng)) continue;
        JointConfig q;
        for (int c = 0; c < 6; ++c) q[c] = 0.02 * i * (c + 1) / 6 + jitter(rng);
        q[6] = grid.value(j);
        grid.Set(i, j, q);
      }
    }
    if (HasEmptyRow(grid)) continue;
    const Plan dp =
        Solve(grid, l, MakeLossParams(AutoPenalty(8, l), kTinyT0, 8, l));
    for (int j = 0; j < grid.m(); ++j) {
      const GreedyResult g = GreedyBaseline(grid, l, kTinyT0, j);
      if (!g.completed) continue;
      ++completed;
      EXPECT_EQ(g.halted_at, -1);
      EXPECT_TRUE(CheckPlan(g.plan, l).empty());
      EXPECT_GE(g.plan.loss, dp.loss);
    }
  }
  EXPECT_GT(completed, 10);
}

TEST(GreedyTest, AbsentStartHaltsImmediately) {
  ParamGrid grid({0.0, 0.05}, 2);
  const GreedyResult g =
      GreedyBaseline(grid, testing::TinyLimits(), kTinyT0, 1);
  EXPECT_FALSE(g.completed);
  EXPECT_EQ(g.halted_at, 0);
}

}  // namespace
}  // namespace redres
