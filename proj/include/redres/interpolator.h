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


#ifndef REDRES_INTERPOLATOR_H_
#define REDRES_INTERPOLATOR_H_

#include <limits>
#include <vector>

#include "redres/dp_planner.h"
#include "redres/kinematics.h"

namespace redres {

struct ActuatorState {
  JointConfig q = JointConfig::Zero();
  JointConfig v = JointConfig::Zero();
  JointConfig a = JointConfig::Zero();
  double t = 0.0;
};

struct EffectiveLimits {
  JointConfig v_max;
  JointConfig a_max;
  JointConfig j_max;
  // Rest must stay reachable within this time after the cycle. Lowest
  // priority: given up before any of the bounds above.
  double stop_time = std::numeric_limits<double>::infinity();
};

struct CycleCommand {
  JointConfig q_d;
  JointConfig v_d;
  JointConfig a_d;
  JointConfig j_d;
  // False when the clamp loop hit its cap on some joint and the command
  // came from the fallback projection.
  bool converged = true;
  int iterations = 0;
};

// Bounds for a motion that must end n0 cycles from now:
// a' = min(a_max, n0 t0 j_max), v' = min(v_max, max(0, n0 t0 a_max -
// a_max^2 / (2 j_max))), and stop_time = (n0 - kStopMarginCycles) t0.
// The first two alone do not keep the stop reachable under the jerk bound,
// hence the stop-time constraint.
EffectiveLimits StoppingLimits(long long n0, double t0,
                               const JointLimits& limits);

inline constexpr long long kStopMarginCycles = 2;

// Shortest time to bring one joint from (v, a) to rest with |a| <= a_max
// and |jerk| <= j_max.
double StopTime(double v, double a, double a_max, double j_max);

inline constexpr int kClampIterationCap = 16;

// One cycle toward q_target, t_r seconds away. Per joint, the desired
// velocity, acceleration and jerk are clamped in turn until all three
// bounds hold. The velocity bound also covers the peak reached while the
// acceleration winds down at full jerk. The stop-time constraint is
// applied last and yields to the other three.
CycleCommand ClampKinematics(const ActuatorState& state,
                             const JointConfig& q_target, double t_r,
                             double t0, const EffectiveLimits& limits);

// Closed-form alternative: projects the desired acceleration onto the
// interval allowed by all bounds, with jerk taking priority over
// acceleration, acceleration over velocity and velocity over stop time
// when they conflict.
CycleCommand ProjectKinematics(const ActuatorState& state,
                               const JointConfig& q_target, double t_r,
                               double t0, const EffectiveLimits& limits);

// Next state under exact execution of a command.
ActuatorState Integrate(const ActuatorState& state, const CycleCommand& cmd,
                        double t0);

struct CycleRecord {
  long long cycle = 0;  // global cycle counter, 0 = initial state
  int segment = 0;
  ActuatorState state;  // state after this cycle's command
  JointConfig j = JointConfig::Zero();
  bool converged = true;
};

struct Stream {
  double t0_cycle = 0.0;
  std::vector<CycleRecord> records;
  // Record index at which each plan sample is due.
  std::vector<long long> sample_record;
  // Record index where each segment starts (at rest on its first sample).
  std::vector<long long> segment_start;
  // Extra cycles spent settling at the end of segments.
  long long settle_cycles = 0;
  bool converged = true;
};

// Follows the plan at the communication rate. Every continuous run of
// samples becomes one segment that starts and ends at rest. Throws
// std::invalid_argument unless the plan interval is an integer multiple of
// t0_cycle.
Stream Follow(const Plan& plan, const JointLimits& limits, double t0_cycle);

}  // namespace redres

#endif  // REDRES_INTERPOLATOR_H_
