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

#include "redres/kinematics.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace redres {
namespace {

using Eigen::Matrix3d;
using Eigen::Vector3d;

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = kPi / 2.0;
// Below this the shoulder axes 1 and 3 are treated as aligned.
constexpr double kShoulderSingularity = 1e-12;

Matrix3d RotX(double angle) {
  return Eigen::AngleAxisd(angle, Vector3d::UnitX()).toRotationMatrix();
}

Matrix3d RotZ(double angle) {
  return Eigen::AngleAxisd(angle, Vector3d::UnitZ()).toRotationMatrix();
}

// Clamps x into [-1, 1] if it is within tolerance; nullopt otherwise.
std::optional<double> ClampUnit(double x) {
  if (x > 1.0 + kTrigClampTolerance || x < -1.0 - kTrigClampTolerance) {
    return std::nullopt;
  }
  return std::clamp(x, -1.0, 1.0);
}

// Wraps angle into [lo, lo + 2*pi).
double WrapFrom(double angle, double lo) {
  double wrapped = std::fmod(angle - lo, 2.0 * kPi);
  if (wrapped < 0.0) wrapped += 2.0 * kPi;
  return lo + wrapped;
}

struct ArmGeometry {
  double d1, d3, a4, a5, d5;
  // |p6 - p2|^2 = k + a * cos(q4) + b * sin(q4)
  double k, a, b;
};

ArmGeometry GeometryOf(const DhTable& dh) {
  ArmGeometry g;
  g.d1 = dh[0].d;
  g.d3 = dh[2].d;
  g.a4 = dh[3].a;
  g.a5 = dh[4].a;
  g.d5 = dh[4].d;
  g.k = g.a4 * g.a4 + g.d3 * g.d3 + g.a5 * g.a5 + g.d5 * g.d5;
  g.a = 2.0 * (g.a4 * g.a5 + g.d3 * g.d5);
  g.b = 2.0 * (g.d3 * g.a5 - g.a4 * g.d5);
  return g;
}

// Shoulder-to-wrist vector expressed in frame 4.
Vector3d ShoulderFromWristInFrame4(const ArmGeometry& g, double q4) {
  const double c4 = std::cos(q4);
  const double s4 = std::sin(q4);
  return {-g.a4 * c4 - g.d3 * s4 - g.a5, g.a4 * s4 - g.d3 * c4 - g.d5, 0.0};
}

bool NearlyEqual(double x, double y) { return std::abs(x - y) < 1e-12; }

}  // namespace

RobotModel DefaultRobotModel() {
  RobotModel model;
  model.dh = {{
      {0.0, 0.333, 0.0, 0.0},
      {0.0, 0.0, -kHalfPi, 0.0},
      {0.0, 0.316, kHalfPi, 0.0},
      {0.0825, 0.0, kHalfPi, 0.0},
      {-0.0825, 0.384, -kHalfPi, 0.0},
      {0.0, 0.0, kHalfPi, 0.0},
      {0.088, 0.0, kHalfPi, 0.0},
      {0.0, 0.107, 0.0, 0.0},
  }};
  JointLimits& l = model.limits;
  l.q_max << 2.8973, 1.7628, 2.8973, -0.0698, 2.8973, 3.7525, 2.8973;
  l.q_min << -2.8973, -1.7628, -2.8973, -3.0718, -2.8973, -0.0175, -2.8973;
  l.v_max << 2.1750, 2.1750, 2.1750, 2.1750, 2.6100, 2.6100, 2.6100;
  l.a_max << 15.0, 7.5, 10.0, 12.5, 15.0, 20.0, 20.0;
  l.j_max << 7500.0, 3750.0, 5000.0, 6250.0, 7500.0, 10000.0, 10000.0;
  return model;
}

void ValidateRobotModel(const RobotModel& model) {
  const DhTable& dh = model.dh;
  const std::array<double, 8> alphas = {0.0,     -kHalfPi, kHalfPi, kHalfPi,
                                        -kHalfPi, kHalfPi, kHalfPi, 0.0};
  for (int i = 0; i < kNumJoints + 1; ++i) {
    if (!NearlyEqual(dh[i].alpha, alphas[i]) ||
        !NearlyEqual(dh[i].theta_offset, 0.0)) {
      throw std::invalid_argument("DH row " + std::to_string(i + 1) +
                                  ": unsupported alpha or theta offset");
    }
  }
  const bool zeros_ok =
      NearlyEqual(dh[0].a, 0.0) && NearlyEqual(dh[1].a, 0.0) &&
      NearlyEqual(dh[1].d, 0.0) && NearlyEqual(dh[2].a, 0.0) &&
      NearlyEqual(dh[3].d, 0.0) && NearlyEqual(dh[5].a, 0.0) &&
      NearlyEqual(dh[5].d, 0.0) && NearlyEqual(dh[6].d, 0.0) &&
      NearlyEqual(dh[7].a, 0.0);
  if (!zeros_ok) {
    throw std::invalid_argument(
        "DH table does not have the spherical-shoulder 7R structure");
  }
  const JointLimits& l = model.limits;
  for (int c = 0; c < kNumJoints; ++c) {
    if (!(l.q_min[c] < l.q_max[c])) {
      throw std::invalid_argument("q_min must be below q_max for joint " +
                                  std::to_string(c + 1));
    }
    if (!(l.v_max[c] > 0.0 && l.a_max[c] > 0.0 && l.j_max[c] > 0.0)) {
      throw std::invalid_argument(
          "velocity, acceleration and jerk limits must be positive");
    }
  }
  if (model.branch_rule == BranchRule::kFixed) {
    const IkBranch& b = model.fixed_branch;
    if (std::abs(b.shoulder) != 1 || std::abs(b.wrist) != 1) {
      throw std::invalid_argument("branch signs must be +1 or -1");
    }
  }
}

Pose LinkTransform(const DhRow& row, double q) {
  Pose t = Pose::Identity();
  t.rotate(Eigen::AngleAxisd(row.alpha, Vector3d::UnitX()));
  t.translate(Vector3d(row.a, 0.0, 0.0));
  t.rotate(Eigen::AngleAxisd(q + row.theta_offset, Vector3d::UnitZ()));
  t.translate(Vector3d(0.0, 0.0, row.d));
  return t;
}

Pose ForwardKinematics(const JointConfig& q, const DhTable& dh) {
  Pose t = Pose::Identity();
  for (int i = 0; i < kNumJoints; ++i) t = t * LinkTransform(dh[i], q[i]);
  return t * LinkTransform(dh[kNumJoints], 0.0);
}

Pose ForwardKinematics(const JointConfig& q, const RobotModel& model) {
  return ForwardKinematics(q, model.dh) * model.tool;
}

bool WithinLimits(const JointConfig& q, const JointLimits& limits) {
  return (q.array() >= limits.q_min.array()).all() &&
         (q.array() <= limits.q_max.array()).all();
}

std::optional<JointConfig> IkFixedQ7(const Pose& pose, double q7,
                                     const IkBranch& branch,
                                     const RobotModel& model) {
  const DhTable& dh = model.dh;
  const JointLimits& limits = model.limits;
  const ArmGeometry g = GeometryOf(dh);

  const Pose flange = pose * model.tool.inverse();
  const Pose frame7 = flange * LinkTransform(dh[7], 0.0).inverse();
  const Pose frame6 = frame7 * LinkTransform(dh[6], q7).inverse();
  const Matrix3d r6 = frame6.linear();
  const Vector3d p6 = frame6.translation();
  const Vector3d p2(0.0, 0.0, g.d1);
  const Vector3d shoulder_from_wrist = p2 - p6;

  JointConfig q;
  q[6] = q7;

  // Elbow from the shoulder-wrist distance.
  const double reach_sq = shoulder_from_wrist.squaredNorm();
  const double amplitude = std::hypot(g.a, g.b);
  const auto cos_arg = ClampUnit((reach_sq - g.k) / amplitude);
  if (!cos_arg) return std::nullopt;
  q[3] = std::atan2(g.b, g.a) - std::acos(*cos_arg);

  // Joint 6 places the joint-5 axis so that the shoulder lies at the
  // right offset along it.
  const Vector3d w = ShoulderFromWristInFrame4(g, q[3]);
  const Vector3d u = r6.transpose() * shoulder_from_wrist;
  const double rho = std::hypot(u.x(), u.y());
  if (rho < 1e-12) return std::nullopt;
  const auto sin_arg = ClampUnit(w.y() / rho);
  if (!sin_arg) return std::nullopt;
  const double beta = std::atan2(u.y(), u.x());
  const double phase = branch.wrist > 0 ? std::asin(*sin_arg)
                                        : kPi - std::asin(*sin_arg);
  q[5] = WrapFrom(phase - beta, limits.q_min[5]);

  const Matrix3d r5 = r6 * (RotX(kHalfPi) * RotZ(q[5])).transpose();
  const Vector3d z5 = r5.col(2);
  Vector3d x4 = (shoulder_from_wrist - w.y() * z5) / w.x();
  x4 -= x4.dot(z5) * z5;
  x4.normalize();
  Matrix3d r4;
  r4.col(0) = x4;
  r4.col(1) = z5;
  r4.col(2) = x4.cross(z5);

  const Matrix3d rot5 = RotX(kHalfPi) * r4.transpose() * r5;
  q[4] = std::atan2(rot5(1, 0), rot5(0, 0));

  const Matrix3d r3 = r4 * (RotX(kHalfPi) * RotZ(q[3])).transpose();
  const Vector3d z3 = r3.col(2);
  const double planar = std::hypot(z3.x(), z3.y());
  const auto cos_q2 = ClampUnit(z3.z());
  if (!cos_q2) return std::nullopt;
  q[1] = branch.shoulder * std::acos(*cos_q2);
  if (planar < kShoulderSingularity) {
    // Axes 1 and 3 are aligned and only q1 + q3 is determined. The whole
    // rotation goes to joint 3; both joints share the same limit span.
    q[0] = 0.0;
  } else {
    q[0] = branch.shoulder > 0 ? std::atan2(z3.y(), z3.x())
                               : std::atan2(-z3.y(), -z3.x());
  }
  const Matrix3d r2_in_3 = RotZ(q[0]) * RotX(-kHalfPi) * RotZ(q[1]) *
                           RotX(kHalfPi);
  const Matrix3d rot3 = r2_in_3.transpose() * r3;
  q[2] = std::atan2(rot3(1, 0), rot3(0, 0));

  if (!q.allFinite() || !WithinLimits(q, limits)) return std::nullopt;
  return q;
}

std::array<std::optional<JointConfig>, 4> IkAllBranches(
    const Pose& pose, double q7, const RobotModel& model) {
  return {IkFixedQ7(pose, q7, {1, 1}, model),
          IkFixedQ7(pose, q7, {1, -1}, model),
          IkFixedQ7(pose, q7, {-1, 1}, model),
          IkFixedQ7(pose, q7, {-1, -1}, model)};
}

std::optional<JointConfig> IkParam(const Pose& pose, double q7,
                                   const RobotModel& model) {
  const JointLimits& limits = model.limits;
  if (!(q7 >= limits.q_min[6] && q7 <= limits.q_max[6])) {
    throw std::out_of_range("q7 = " + std::to_string(q7) +
                            " outside the joint-7 limits");
  }
  if (model.branch_rule == BranchRule::kFixed) {
    return IkFixedQ7(pose, q7, model.fixed_branch, model);
  }
  // The (+1, *) entries come first, so a strict comparison on |q1| keeps
  // the upper shoulder and then wrist +1 on ties.
  std::optional<JointConfig> best;
  for (const auto& candidate : IkAllBranches(pose, q7, model)) {
    if (!candidate) continue;
    if (!best) {
      best = candidate;
      continue;
    }
    const bool best_upper = (*best)[1] >= 0.0;
    const bool cand_upper = (*candidate)[1] >= 0.0;
    if (cand_upper != best_upper) {
      if (cand_upper) best = candidate;
    } else if (std::abs((*candidate)[0]) < std::abs((*best)[0])) {
      best = candidate;
    }
  }
  return best;
}

IkBranch BranchOf(const JointConfig& q, const RobotModel& model) {
  const DhTable& dh = model.dh;
  const ArmGeometry g = GeometryOf(dh);
  Pose frame6 = Pose::Identity();
  for (int i = 0; i < 6; ++i) frame6 = frame6 * LinkTransform(dh[i], q[i]);
  const Vector3d p2(0.0, 0.0, g.d1);
  const Vector3d u =
      frame6.linear().transpose() * (p2 - frame6.translation());
  const double beta = std::atan2(u.y(), u.x());
  IkBranch branch;
  branch.shoulder = q[1] >= 0.0 ? 1 : -1;
  branch.wrist = std::cos(q[5] + beta) >= 0.0 ? 1 : -1;
  return branch;
}

double RotationDistance(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
  return Eigen::AngleAxisd(a.transpose() * b).angle();
}

}  // namespace redres
