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


#ifndef REDRES_ROBOT_CONFIG_H_
#define REDRES_ROBOT_CONFIG_H_

#include <iosfwd>
#include <map>
#include <string>

#include "redres/kinematics.h"

namespace redres {

// Environment variable naming the robot model file used when none is given.
inline constexpr char kRobotModelEnv[] = "REDRES_ROBOT_MODEL";

// Parses "key = value" lines; '#' starts a comment. Throws
// std::runtime_error on malformed lines or duplicate keys.
std::map<std::string, std::string> ParseKeyValues(std::istream& in);

// Keys not present keep the default model's values. Recognized keys:
//   dh.1 .. dh.8     a d alpha theta_offset (alpha accepts pi/2, -pi/2)
//   q_min q_max v_max a_max j_max     seven numbers each
//   branch_rule      prefer_upper_shoulder | fixed
//   fixed_branch     shoulder wrist (each +1 or -1)
//   tool             x y z qw qx qy qz
// Throws std::runtime_error on syntax errors or unknown keys and
// std::invalid_argument when the model fails validation.
RobotModel ParseRobotModel(std::istream& in);
RobotModel LoadRobotModel(const std::string& path);

void WriteRobotModel(const RobotModel& model, std::ostream& out);

}  // namespace redres

#endif  // REDRES_ROBOT_CONFIG_H_
