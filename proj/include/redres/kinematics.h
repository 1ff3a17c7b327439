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

#ifndef REDRES_KINEMATICS_H_
#define REDRES_KINEMATICS_H_

#include <array>
#include <optional>

#include <Eigen/Geometry>

namespace redres {

inline constexpr int kNumJoints = 7;

using JointConfig = Eigen::Matrix<double, kNumJoints, 1>;
using Pose = Eigen::Isometry3d;

// One modified Denavit-Hartenberg row. The link transform is
// RotX(alpha) * TransX(a) * RotZ(q + theta_offset) * TransZ(d).
struct DhRow {
  double a = 0.0;
  double d = 0.0;
  double alpha = 0.0;
  double theta_offset = 0.0;
};

// Seven joint rows followed by the fixed flange row.
using DhTable = std::array<DhRow, kNumJoints + 1>;

struct JointLimits {
  JointConfig q_min;
  JointConfig q_max;
  JointConfig v_max;
  JointConfig a_max;
  JointConfig j_max;
};

// Shoulder sign +1 selects q2 >= 0. Wrist sign selects between the two
// solutions of the q6 equation. The elbow is fixed to q4 <= atan2(B, A),
// the solution family spanning the joint-4 range.
struct IkBranch {
  int shoulder = 1;
  int wrist = 1;

  friend bool operator==(const IkBranch&, const IkBranch&) = default;
};

enum class BranchRule {
  // Prefer q2 >= 0, then smaller |q1|, then wrist +1.
  kPreferUpperShoulder,
  // Always use RobotModel::fixed_branch.
  kFixed,
};

struct RobotModel {
  DhTable dh;
  JointLimits limits;
  BranchRule branch_rule = BranchRule::kPreferUpperShoulder;
  IkBranch fixed_branch;
  // Flange to tool transform; identity means poses are flange poses.
  Pose tool = Pose::Identity();
};

// The 7-DOF arm with the default limit table and manufacturer jerk limits.
RobotModel DefaultRobotModel();

// Throws std::invalid_argument when the table does not have the
// joint-axis structure the closed-form inverse kinematics relies on, or
// when the limits are inconsistent.
void ValidateRobotModel(const RobotModel& model);

Pose LinkTransform(const DhRow& row, double q);

// Flange pose by chained link transforms.
Pose ForwardKinematics(const JointConfig& q, const DhTable& dh);

// Tool pose (flange pose composed with the model's tool transform).
Pose ForwardKinematics(const JointConfig& q, const RobotModel& model);

bool WithinLimits(const JointConfig& q, const JointLimits& limits);

// Closed-form inverse kinematics with q7 held fixed, on one branch.
// Returns nullopt when the wrist centre is out of reach, a trigonometric
// argument leaves [-1, 1] by more than kTrigClampTolerance, or a joint
// leaves its limits.
std::optional<JointConfig> IkFixedQ7(const Pose& pose, double q7,
                                     const IkBranch& branch,
                                     const RobotModel& model);

// Solutions on all four shoulder/wrist branches, ordered
// (+1,+1), (+1,-1), (-1,+1), (-1,-1).
std::array<std::optional<JointConfig>, 4> IkAllBranches(
    const Pose& pose, double q7, const RobotModel& model);

// Parameterized inverse kinematics on the canonical branch. Throws
// std::out_of_range if q7 lies outside the joint-7 limits.
std::optional<JointConfig> IkParam(const Pose& pose, double q7,
                                   const RobotModel& model);

// Branch the closed-form solver would need to reproduce q.
IkBranch BranchOf(const JointConfig& q, const RobotModel& model);

// Geodesic angle between two rotations, radians.
double RotationDistance(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b);

inline constexpr double kTrigClampTolerance = 1e-10;

}  // namespace redres

#endif  // REDRES_KINEMATICS_H_
