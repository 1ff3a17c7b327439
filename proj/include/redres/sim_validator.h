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


#ifndef REDRES_SIM_VALIDATOR_H_
#define REDRES_SIM_VALIDATOR_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "redres/dp_planner.h"
#include "redres/interpolator.h"
#include "redres/kinematics.h"
#include "redres/path_model.h"

namespace redres {

struct Trace {
  Stream stream;
  // Original path pose index of each plan sample.
  std::vector<int> pose_index;
  // Tool pose reached when each plan sample is due.
  std::vector<Pose> sample_poses;
};

Trace Replay(const Plan& plan, const RobotModel& model, double t0_cycle);

struct Violation {
  long long record = 0;
  int joint = 0;
  char kind = 'q';  // q, v, a or j
  double value = 0.0;
  double bound = 0.0;
};

struct ConstraintReport {
  std::vector<Violation> violations;
  // Signed extrema of v, a, j per joint divided by the limit.
  JointConfig v_min_norm = JointConfig::Zero();
  JointConfig v_max_norm = JointConfig::Zero();
  JointConfig a_min_norm = JointConfig::Zero();
  JointConfig a_max_norm = JointConfig::Zero();
  JointConfig j_min_norm = JointConfig::Zero();
  JointConfig j_max_norm = JointConfig::Zero();
  // Largest recomputed |v| and |a| at the end of any segment.
  double terminal_v = 0.0;
  double terminal_a = 0.0;
  long long cycles = 0;
};

// Multiple of machine epsilon granted to finite differences of commanded
// angles: the order-k difference of values near Q carries round-off of
// about 2^k eps (Q + 1) / t0^k.
inline constexpr double kRoundOffFactor = 16.0;

// Recomputes v, a, j by finite differences of the commanded angles within
// each segment (segments start at rest) and checks every limit.
ConstraintReport ValidateConstraints(const Stream& stream,
                                     const JointLimits& limits);

void WriteConstraintReport(const ConstraintReport& report, std::ostream& out);

// Checks a plan sample by sample: positions everywhere, velocity on
// continuous steps, acceleration on consecutive continuous steps. The
// record field of each violation holds the sample index.
std::vector<Violation> CheckPlan(const Plan& plan, const JointLimits& limits);

struct ErrorStats {
  std::vector<double> translation;  // meters, per plan sample
  std::vector<double> rotation;     // radians, per plan sample
  double mean = 0.0;
  double max = 0.0;
  double rotation_mean = 0.0;
  double rotation_max = 0.0;
};

// Distance between the reached and the desired tool pose at every sample.
ErrorStats CartesianError(const Trace& trace, const SampledPath& path);

// Same measure for a plan evaluated directly at its samples.
ErrorStats PlanError(const Plan& plan, const SampledPath& path,
                     const RobotModel& model);

void WriteStreamCsv(const Stream& stream, std::ostream& out);
void WriteErrorCsv(const ErrorStats& stats, std::ostream& out);

struct GreedyResult {
  bool completed = false;
  // First sample that could not be reached, or -1.
  int halted_at = -1;
  // Prefix actually traversed, without breaks.
  Plan plan;
};

// Local baseline: from the given first column, always steps to the
// reachable column with the smallest squared joint distance.
GreedyResult GreedyBaseline(const ParamGrid& grid, const JointLimits& limits,
                            double t0, int start_column);

// Exhaustive search over index sequences and continuity flags with the
// planner's cost rules and tie-break. Throws std::invalid_argument when
// m^(n+1) > 1e7.
Plan BruteForceSolve(const ParamGrid& grid, const JointLimits& limits,
                     const LossParams& lp);

}  // namespace redres

#endif  // REDRES_SIM_VALIDATOR_H_
