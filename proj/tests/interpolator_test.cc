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

#include "redres/interpolator.h"

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "redres/sim_validator.h"

namespace redres {
namespace {

constexpr double kCycle = 0.001;

EffectiveLimits Uniform(double v, double a, double j) {
  return {JointConfig::Constant(v), JointConfig::Constant(a),
          JointConfig::Constant(j)};
}

TEST(StoppingLimitsTest, HandValues) {
  const JointLimits l = DefaultRobotModel().limits;
  const EffectiveLimits zero = StoppingLimits(0, kCycle, l);
  EXPECT_EQ(zero.a_max, JointConfig::Zero());
  EXPECT_EQ(zero.v_max, JointConfig::Zero());
  EXPECT_EQ(zero.j_max, l.j_max);
  // Joint 1: a = 15, j = 7500.
  const EffectiveLimits one = StoppingLimits(1, kCycle, l);
  EXPECT_DOUBLE_EQ(one.a_max[0], 7.5);
  EXPECT_EQ(one.v_max[0], 0.0);
  const EffectiveLimits ten = StoppingLimits(10, kCycle, l);
  EXPECT_DOUBLE_EQ(ten.a_max[0], 15.0);
  EXPECT_NEAR(ten.v_max[0], 0.15 - 225.0 / 15000.0, 1e-15);
  const EffectiveLimits far = StoppingLimits(100000, kCycle, l);
  EXPECT_EQ(far.a_max, l.a_max);
  EXPECT_EQ(far.v_max, l.v_max);
  EXPECT_THROW(StoppingLimits(-1, kCycle, l), std::invalid_argument);
}

TEST(StoppingLimitsTest, ShrinkMonotonically) {
  const JointLimits l = DefaultRobotModel().limits;
  EffectiveLimits prev = StoppingLimits(0, kCycle, l);
  for (long long n0 = 1; n0 < 500; ++n0) {
    const EffectiveLimits cur = StoppingLimits(n0, kCycle, l);
    EXPECT_TRUE((cur.v_max.array() >= prev.v_max.array()).all());
    EXPECT_TRUE((cur.a_max.array() >= prev.a_max.array()).all());
    prev = cur;
  }
}

TEST(ClampTest, HandSteppedRamp) {
  const EffectiveLimits lim = Uniform(1.0, 10.0, 1000.0);
  ActuatorState s;
  const JointConfig target = JointConfig::Constant(1.0);
  CycleCommand cmd = ClampKinematics(s, target, 0.01, kCycle, lim);
  EXPECT_TRUE(cmd.converged);
  EXPECT_DOUBLE_EQ(cmd.j_d[0], 1000.0);
  EXPECT_DOUBLE_EQ(cmd.a_d[0], 1.0);
  EXPECT_DOUBLE_EQ(cmd.v_d[0], 0.001);
  EXPECT_DOUBLE_EQ(cmd.q_d[0], 1e-6);
  s = Integrate(s, cmd, kCycle);
  EXPECT_DOUBLE_EQ(s.t, kCycle);
  cmd = ClampKinematics(s, target, 0.009, kCycle, lim);
  EXPECT_DOUBLE_EQ(cmd.a_d[3], 2.0);
  EXPECT_DOUBLE_EQ(cmd.v_d[3], 0.003);
  EXPECT_DOUBLE_EQ(cmd.q_d[3], 4e-6);
}

TEST(ClampTest, AccelerationCapHoldsJerkBack) {
  const EffectiveLimits lim = Uniform(100.0, 10.0, 1000.0);
  ActuatorState s;
  s.a = JointConfig::Constant(9.5);
  const CycleCommand cmd =
      ClampKinematics(s, JointConfig::Constant(5.0), 0.01, kCycle, lim);
  EXPECT_DOUBLE_EQ(cmd.a_d[0], 10.0);
  EXPECT_NEAR(cmd.j_d[0], 500.0, 1e-9);
}

TEST(ClampTest, VelocityCapLeavesRoomToRampDown) {
  const EffectiveLimits lim = Uniform(1.0, 10.0, 1000.0);
  ActuatorState s;
  s.v = JointConfig::Constant(0.999);
  const CycleCommand cmd =
      ClampKinematics(s, JointConfig::Constant(5.0), 0.01, kCycle, lim);
  // One jerk step is 1 m/s^2 per cycle: a = 1 lands on v = 1 and the next
  // step brings the acceleration to zero.
  EXPECT_NEAR(cmd.a_d[0], 1.0, 1e-12);
  EXPECT_LE(cmd.v_d[0], 1.0 + 1e-12);
}

// Stepping the acceleration down at full jerk after the command never
// carries the velocity past the bound, and the bound is tight.
TEST(ClampTest, VelocityCapMatchesSteppedRampDown) {
  // One jerk step is u = 40 m/s^2 per cycle.
  const double u = 40.0;
  const EffectiveLimits lim = Uniform(1.0, 400.0, u / kCycle);
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> speed(0.9, 1.0);
  auto peak = [u](double v, double a) {
    for (; a > 0.0; a -= u) v += std::max(a - u, 0.0) * kCycle;
    return v;
  };
  for (int trial = 0; trial < 2000; ++trial) {
    ActuatorState s;
    s.v = JointConfig::Constant(speed(rng));
    s.a = JointConfig::Constant(u);
    const CycleCommand cmd =
        ClampKinematics(s, JointConfig::Constant(50.0), 0.01, kCycle, lim);
    ASSERT_TRUE(cmd.converged) << trial;
    ASSERT_LE(peak(cmd.v_d[0], cmd.a_d[0]), 1.0 + 1e-12) << trial;
    if (cmd.a_d[0] < 2.0 * u - 1e-9) {
      const double a_more = cmd.a_d[0] + 1e-6;
      EXPECT_GT(peak(s.v[0] + a_more * kCycle, a_more), 1.0) << trial;
    }
  }
}

TEST(ClampTest, RejectsBadTiming) {
  const EffectiveLimits lim = Uniform(1.0, 10.0, 1000.0);
  ActuatorState s;
  EXPECT_THROW(ClampKinematics(s, s.q, 0.0005, kCycle, lim),
               std::invalid_argument);
  EXPECT_THROW(ProjectKinematics(s, s.q, kCycle, 0.0, lim),
               std::invalid_argument);
}

// Both routes compute the point of the admissible acceleration interval
// nearest the desired one.
TEST(ClampTest, LoopMatchesProjectionOnRandomPairs) {
  const JointLimits base = DefaultRobotModel().limits;
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> horizon(0, 400);
  std::uniform_real_distribution<double> cycles(1.0, 10.0);
  long long fallbacks = 0;
  for (int trial = 0; trial < 1000000 / kNumJoints; ++trial) {
    const EffectiveLimits lim = StoppingLimits(horizon(rng), kCycle, base);
    ActuatorState s;
    JointConfig target;
    for (int c = 0; c < kNumJoints; ++c) {
      s.q[c] = unit(rng);
      s.v[c] = 1.1 * base.v_max[c] * unit(rng);
      s.a[c] = 1.1 * base.a_max[c] * unit(rng);
      target[c] = s.q[c] + 0.05 * unit(rng);
    }
    const double t_r = std::floor(cycles(rng)) * kCycle;
    const CycleCommand loop = ClampKinematics(s, target, t_r, kCycle, lim);
    const CycleCommand proj = ProjectKinematics(s, target, t_r, kCycle, lim);
    fallbacks += !loop.converged;
    ASSERT_EQ(loop.converged, proj.converged) << trial;
    for (int c = 0; c < kNumJoints; ++c) {
      const double scale = 1.0 + std::abs(proj.a_d[c]);
      ASSERT_NEAR(loop.a_d[c], proj.a_d[c], 1e-9 * scale) << trial;
      ASSERT_LE(std::abs(loop.j_d[c]), lim.j_max[c]);
      ASSERT_LE(std::abs(loop.a_d[c]), lim.a_max[c]);
      if (loop.converged) ASSERT_LE(std::abs(loop.v_d[c]), lim.v_max[c]);
    }
    ASSERT_LE(loop.iterations, kClampIterationCap);
  }
  EXPECT_GT(fallbacks, 0);
}

// Searches the peak deceleration p of a jerk -J / hold / jerk +J profile,
// integrates it, and keeps the shortest one that ends at rest.
double SearchedStopTime(double v, double a, double amax, double jmax) {
  if (v + a * std::abs(a) / (2.0 * jmax) < 0.0) {
    v = -v;
    a = -a;
  }
  double best = std::numeric_limits<double>::infinity();
  const int steps = 20000;
  for (int k = 0; k <= steps; ++k) {
    const double p = amax * k / steps;
    const double t1 = (a + p) / jmax;
    const double t3 = p / jmax;
    if (t1 < 0.0) continue;
    const double v1 = v + a * t1 - 0.5 * jmax * t1 * t1;
    const double v3 = -p * t3 + 0.5 * jmax * t3 * t3;
    const double hold = p > 0.0 ? (v1 + v3) / p : (v1 + v3 == 0.0 ? 0.0 : -1);
    if (hold < -1e-12) continue;
    best = std::min(best, t1 + std::max(hold, 0.0) + t3);
  }
  return best;
}

TEST(StopTimeTest, MatchesSearchedProfile) {
  std::mt19937_64 rng(54);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double amax = 5.0 + 10.0 * std::abs(unit(rng));
    const double jmax = 1000.0 + 6000.0 * std::abs(unit(rng));
    const double v = 2.0 * unit(rng);
    const double a = amax * unit(rng);
    const double t = StopTime(v, a, amax, jmax);
    // The search resolves p to amax / 20000.
    EXPECT_NEAR(t, SearchedStopTime(v, a, amax, jmax), 2e-4) << trial;
  }
  EXPECT_EQ(StopTime(0.0, 0.0, 10.0, 1000.0), 0.0);
  // Pure hold: ramp 0.01 s each way plus (1 - 0.1) / 10 s at full braking.
  EXPECT_NEAR(StopTime(1.0, 0.0, 10.0, 1000.0), 0.02 + 0.09, 1e-12);
}

// A state on the stopping bounds with zero acceleration needs one cycle
// more than the bounds suggest, which is why the stop-time constraint
// exists.
TEST(StoppingLimitsTest, BoundaryStateNeedsAnExtraCycle) {
  const JointLimits l = DefaultRobotModel().limits;
  const EffectiveLimits full = StoppingLimits(1 << 30, kCycle, l);
  for (int n0 : {3, 10, 50, 200}) {
    ActuatorState s;
    s.v = StoppingLimits(n0, kCycle, l).v_max;
    int cycles = 0;
    while (s.v.cwiseAbs().maxCoeff() > 1e-12 ||
           s.a.cwiseAbs().maxCoeff() > 1e-12) {
      s = Integrate(s, ClampKinematics(s, s.q, kCycle, kCycle, full), kCycle);
      ++cycles;
    }
    EXPECT_EQ(cycles, n0 + 1) << n0;
  }
}

// Holding position under shrinking stopping limits from any state that
// meets the stop-time constraint reaches rest on time, within bounds.
TEST(StoppingLimitsTest, StopTimeStatesReachRestOnTime) {
  const JointLimits l = DefaultRobotModel().limits;
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  int tried = 0;
  while (tried < 300) {
    const long long n0 = 5 + static_cast<long long>(300 * std::abs(unit(rng)));
    const EffectiveLimits start = StoppingLimits(n0, kCycle, l);
    ActuatorState s;
    s.q = 0.5 * (l.q_min + l.q_max);
    bool ok = true;
    for (int c = 0; c < kNumJoints; ++c) {
      s.v[c] = start.v_max[c] * unit(rng);
      s.a[c] = start.a_max[c] * unit(rng);
      ok = ok && StopTime(s.v[c], s.a[c], l.a_max[c], l.j_max[c]) <=
                     start.stop_time;
    }
    if (!ok) continue;
    ++tried;
    for (long long k = n0 - 1; k >= 0; --k) {
      const EffectiveLimits lim = StoppingLimits(k, kCycle, l);
      const CycleCommand cmd = ClampKinematics(s, s.q, kCycle, kCycle, lim);
      ASSERT_TRUE(cmd.converged) << tried << " " << k;
      s = Integrate(s, cmd, kCycle);
    }
    EXPECT_LE(s.v.cwiseAbs().maxCoeff(), 1e-9) << tried;
    EXPECT_LE(s.a.cwiseAbs().maxCoeff(), 1e-9) << tried;
  }
}

// From a consistent state the loop always finds a command within bounds.
TEST(ClampTest, ReachableStatesConverge) {
  const JointLimits base = DefaultRobotModel().limits;
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const EffectiveLimits lim = StoppingLimits(1 << 30, kCycle, base);
  for (int run = 0; run < 200; ++run) {
    ActuatorState s;
    JointConfig target;
    for (int c = 0; c < kNumJoints; ++c) target[c] = 0.5 * unit(rng);
    for (int cycle = 0; cycle < 300; ++cycle) {
      const CycleCommand cmd = ClampKinematics(s, target, kCycle, kCycle, lim);
      ASSERT_TRUE(cmd.converged) << run << " " << cycle;
      s = Integrate(s, cmd, kCycle);
    }
  }
}

// Ramp on every joint from the middle of its range.
Plan RampPlan(int samples, double step, double t0) {
  const JointLimits l = DefaultRobotModel().limits;
  const JointConfig mid = 0.5 * (l.q_min + l.q_max);
  Plan plan;
  plan.t0 = t0;
  for (int i = 0; i < samples; ++i) {
    plan.joints.push_back(mid + JointConfig::Constant(step * i));
    plan.indices.push_back(0);
    plan.cont.push_back(true);
    plan.pose_index.push_back(i);
  }
  return plan;
}

TEST(FollowTest, SingleSegment) {
  const JointLimits l = DefaultRobotModel().limits;
  const Plan plan = RampPlan(11, 0.002, 0.01);
  const Stream stream = Follow(plan, l, kCycle);
  EXPECT_TRUE(stream.converged);
  ASSERT_EQ(stream.segment_start, (std::vector<long long>{0}));
  EXPECT_EQ(stream.records.size(), 101u + stream.settle_cycles);
  for (int i = 0; i <= 10; ++i) EXPECT_EQ(stream.sample_record[i], 10 * i);
  EXPECT_EQ(stream.records.front().state.q, plan.joints.front());
  const auto& last = stream.records.back().state;
  EXPECT_LE(last.v.cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE(last.a.cwiseAbs().maxCoeff(), 1e-9);
  const ConstraintReport report = ValidateConstraints(stream, l);
  EXPECT_TRUE(report.violations.empty());
  EXPECT_LE(report.terminal_v, 1e-9);
}

TEST(FollowTest, BreakStartsANewSegmentAtRest) {
  const JointLimits l = DefaultRobotModel().limits;
  Plan plan = RampPlan(8, 0.002, 0.01);
  for (int i = 4; i < 8; ++i) plan.joints[i] += JointConfig::Constant(0.5);
  plan.cont[4] = false;
  const Stream stream = Follow(plan, l, kCycle);
  ASSERT_EQ(stream.segment_start.size(), 2u);
  const CycleRecord& first = stream.records[stream.segment_start[1]];
  EXPECT_EQ(first.segment, 1);
  EXPECT_EQ(first.state.q, plan.joints[4]);
  EXPECT_EQ(first.state.v, JointConfig::Zero());
  EXPECT_EQ(stream.sample_record[4], stream.segment_start[1]);
  // The re-posed start takes the next cycle slot.
  const CycleRecord& before = stream.records[stream.segment_start[1] - 1];
  EXPECT_EQ(first.cycle, before.cycle + 1);
  EXPECT_TRUE(ValidateConstraints(stream, l).violations.empty());
}

TEST(FollowTest, RejectsMismatchedRates) {
  const JointLimits l = DefaultRobotModel().limits;
  const Plan plan = RampPlan(3, 0.001, 0.0105);
  EXPECT_THROW(Follow(plan, l, kCycle), std::invalid_argument);
  EXPECT_THROW(Follow(Plan{}, l, kCycle), std::invalid_argument);
  EXPECT_THROW(Follow(RampPlan(2, 0.0, 0.01), l, 0.0),
               std::invalid_argument);
}

TEST(FollowTest, SinglePointPlan) {
  const Stream stream = Follow(RampPlan(1, 0.0, 0.01),
                               DefaultRobotModel().limits, kCycle);
  EXPECT_EQ(stream.records.size(), 1u);
  EXPECT_EQ(stream.sample_record[0], 0);
}

}  // namespace
}  // namespace redres
