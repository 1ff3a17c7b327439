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

#ifndef REDRES_PATH_MODEL_H_
#define REDRES_PATH_MODEL_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "redres/kinematics.h"

namespace redres {

// Circle of radius 0.1 m around (0.6, 0, 0.1) with the tool pointing down,
// traversed once. Path 1 starts at the inner point with a smooth
// accelerate-decelerate profile; path 2 starts at the outer point with
// constant angular speed.
enum class AnalyticPath { kTest1, kTest2 };

// Throws std::out_of_range unless 0 <= t <= t_max.
Pose TestPath1(double t, double t_max);
Pose TestPath2(double t, double t_max);
Pose EvaluateAnalyticPath(AnalyticPath path, double t, double t_max);

struct Waypoint {
  double t = 0.0;
  Pose pose = Pose::Identity();
};

struct PathSpec {
  std::string id;
  std::optional<AnalyticPath> analytic;
  // Used when analytic is empty. Times are relative to the first waypoint.
  std::vector<Waypoint> waypoints;
  // Ignored for waypoint paths (taken from the last waypoint).
  double t_max = 10.0;
  double t0 = 0.01;
};

struct SampledPath {
  std::string id;
  double t0 = 0.0;
  std::vector<Pose> poses;
  bool circular = false;

  int n() const { return static_cast<int>(poses.size()) - 1; }
  double time(int i) const { return i * t0; }
};

// n = t_max / t0 when that ratio is an integer; throws std::invalid_argument
// otherwise.
int SampleCount(double t_max, double t0);

// Throws std::invalid_argument for non-integer t_max / t0, bad waypoints.
SampledPath SamplePath(const PathSpec& spec);

// True when the first and last poses agree to 1e-12 per matrix entry.
bool IsCircular(const std::vector<Pose>& poses);

// CSV with header t,x,y,z,qw,qx,qy,qz. Throws std::runtime_error on
// malformed input and std::invalid_argument on unsorted times.
std::vector<Waypoint> ReadWaypointsCsv(std::istream& in);
std::vector<Waypoint> ReadWaypointsCsv(const std::string& path);

// Uniform q7 grid with the cached inverse-kinematics table. Row i holds
// sample i, column j the value a_j; configurations are stored contiguously.
class ParamGrid {
 public:
  ParamGrid() = default;
  ParamGrid(std::vector<double> values, int num_samples);

  int num_samples() const { return num_samples_; }
  int n() const { return num_samples_ - 1; }
  int m() const { return static_cast<int>(values_.size()); }
  double value(int j) const { return values_[j]; }
  const std::vector<double>& values() const { return values_; }
  double delta() const;

  bool present(int i, int j) const { return present_[Cell(i, j)] != 0; }
  // Pointer to the 7 joint values of cell (i, j).
  const double* data(int i, int j) const { return &configs_[Cell(i, j) * 7]; }
  JointConfig config(int i, int j) const;
  std::optional<JointConfig> at(int i, int j) const;

  void Set(int i, int j, const std::optional<JointConfig>& q);

 private:
  std::size_t Cell(int i, int j) const {
    return static_cast<std::size_t>(i) * values_.size() + j;
  }

  std::vector<double> values_;
  int num_samples_ = 0;
  std::vector<double> configs_;
  std::vector<std::uint8_t> present_;
};

// a_j = q_min7 + j * (q_max7 - q_min7) / (m - 1), endpoints exact.
std::vector<double> UniformParamValues(int m, const JointLimits& limits);

// Throws std::invalid_argument for m < 2. Cells are filled by `workers`
// threads; the result does not depend on the worker count.
ParamGrid BuildParamGrid(const SampledPath& path, int m,
                         const RobotModel& model, int workers = 1);

// Largest index offset whose q7 values stay within v_max7 * t0. Wider
// offsets violate the joint-7 velocity bound on their own.
int VelocityBandHalfWidth(const ParamGrid& grid, const JointLimits& limits,
                          double t0);

}  // namespace redres

#endif  // REDRES_PATH_MODEL_H_
