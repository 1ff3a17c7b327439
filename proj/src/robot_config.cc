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


#include "redres/robot_config.h"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "redres/format.h"

namespace redres {
namespace {

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double ParseNumber(const std::string& key, const std::string& token) {
  constexpr double kPi = std::numbers::pi;
  if (token == "pi/2") return kPi / 2;
  if (token == "-pi/2") return -kPi / 2;
  if (token == "pi") return kPi;
  if (token == "-pi") return -kPi;
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != token.size() || !std::isfinite(value)) {
    throw std::runtime_error("robot model: bad number '" + token +
                             "' for key " + key);
  }
  return value;
}

std::vector<double> ParseNumbers(const std::string& key,
                                 const std::string& value,
                                 std::size_t count) {
  std::istringstream ss(value);
  std::vector<double> out;
  std::string token;
  while (ss >> token) out.push_back(ParseNumber(key, token));
  if (out.size() != count) {
    throw std::runtime_error("robot model: key " + key + " needs " +
                             std::to_string(count) + " numbers");
  }
  return out;
}

JointConfig ToJoints(const std::vector<double>& v) {
  JointConfig q;
  for (int c = 0; c < kNumJoints; ++c) q(c) = v[c];
  return q;
}

std::string JoinJoints(const JointConfig& q) {
  std::string s;
  for (int c = 0; c < kNumJoints; ++c) {
    if (c > 0) s += ' ';
    s += FormatDouble(q(c));
  }
  return s;
}

}  // namespace

std::map<std::string, std::string> ParseKeyValues(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": expected key = value");
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": empty key");
    }
    if (!out.emplace(key, value).second) {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": duplicate key " + key);
    }
  }
  return out;
}

RobotModel ParseRobotModel(std::istream& in) {
  RobotModel model = DefaultRobotModel();
  for (const auto& [key, value] : ParseKeyValues(in)) {
    if (key.rfind("dh.", 0) == 0) {
      const std::string row_text = key.substr(3);
      const int row = row_text.size() == 1 ? row_text[0] - '0' : 0;
      if (row < 1 || row > kNumJoints + 1) {
        throw std::runtime_error("robot model: unknown key " + key);
      }
      const auto v = ParseNumbers(key, value, 4);
      model.dh[row - 1] = DhRow{v[0], v[1], v[2], v[3]};
    } else if (key == "q_min") {
      model.limits.q_min = ToJoints(ParseNumbers(key, value, 7));
    } else if (key == "q_max") {
      model.limits.q_max = ToJoints(ParseNumbers(key, value, 7));
    } else if (key == "v_max") {
      model.limits.v_max = ToJoints(ParseNumbers(key, value, 7));
    } else if (key == "a_max") {
      model.limits.a_max = ToJoints(ParseNumbers(key, value, 7));
    } else if (key == "j_max") {
      model.limits.j_max = ToJoints(ParseNumbers(key, value, 7));
    } else if (key == "branch_rule") {
      if (value == "prefer_upper_shoulder") {
        model.branch_rule = BranchRule::kPreferUpperShoulder;
      } else if (value == "fixed") {
        model.branch_rule = BranchRule::kFixed;
      } else {
        throw std::runtime_error("robot model: unknown branch_rule " + value);
      }
    } else if (key == "fixed_branch") {
      const auto v = ParseNumbers(key, value, 2);
      for (double sign : v) {
        if (sign != 1.0 && sign != -1.0) {
          throw std::runtime_error("robot model: fixed_branch takes +1 or -1");
        }
      }
      model.fixed_branch = IkBranch{static_cast<int>(v[0]),
                                    static_cast<int>(v[1])};
    } else if (key == "tool") {
      const auto v = ParseNumbers(key, value, 7);
      const Eigen::Quaterniond q(v[3], v[4], v[5], v[6]);
      if (q.norm() < 1e-9) throw std::runtime_error("robot model: tool quat");
      model.tool = Pose::Identity();
      model.tool.linear() = q.normalized().toRotationMatrix();
      model.tool.translation() << v[0], v[1], v[2];
    } else {
      throw std::runtime_error("robot model: unknown key " + key);
    }
  }
  ValidateRobotModel(model);
  return model;
}

RobotModel LoadRobotModel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  return ParseRobotModel(in);
}

void WriteRobotModel(const RobotModel& model, std::ostream& out) {
  for (int r = 0; r < kNumJoints + 1; ++r) {
    const DhRow& row = model.dh[r];
    out << "dh." << r + 1 << " = " << FormatDouble(row.a) << ' '
        << FormatDouble(row.d) << ' ' << FormatDouble(row.alpha) << ' '
        << FormatDouble(row.theta_offset) << '\n';
  }
  out << "q_min = " << JoinJoints(model.limits.q_min) << '\n'
      << "q_max = " << JoinJoints(model.limits.q_max) << '\n'
      << "v_max = " << JoinJoints(model.limits.v_max) << '\n'
      << "a_max = " << JoinJoints(model.limits.a_max) << '\n'
      << "j_max = " << JoinJoints(model.limits.j_max) << '\n'
      << "branch_rule = "
      << (model.branch_rule == BranchRule::kFixed ? "fixed"
                                                  : "prefer_upper_shoulder")
      << '\n'
      << "fixed_branch = " << model.fixed_branch.shoulder << ' '
      << model.fixed_branch.wrist << '\n';
  const Eigen::Quaterniond q(model.tool.linear());
  const auto& p = model.tool.translation();
  out << "tool = " << FormatDouble(p.x()) << ' ' << FormatDouble(p.y()) << ' '
      << FormatDouble(p.z()) << ' ' << FormatDouble(q.w()) << ' '
      << FormatDouble(q.x()) << ' ' << FormatDouble(q.y()) << ' '
      << FormatDouble(q.z()) << '\n';
}

}  // namespace redres
