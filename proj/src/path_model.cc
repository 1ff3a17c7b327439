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

#include "redres/path_model.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace redres {
namespace {

constexpr double kPi = std::numbers::pi;

// Tool pointing down, x axis at angle theta in the horizontal plane.
Pose CirclePose(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Pose pose = Pose::Identity();
  pose.linear() << c, s, 0.0,
                   s, -c, 0.0,
                   0.0, 0.0, -1.0;
  pose.translation() << 0.6 + 0.1 * c, 0.1 * s, 0.1;
  return pose;
}

void CheckTime(double t, double t_max) {
  if (!(t_max > 0.0)) throw std::out_of_range("t_max must be positive");
  if (!(t >= 0.0 && t <= t_max)) {
    throw std::out_of_range("path time " + std::to_string(t) +
                            " outside [0, " + std::to_string(t_max) + "]");
  }
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double ParseDouble(const std::string& text, int line_no) {
  const std::string s = Trim(text);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(value)) {
    throw std::runtime_error("waypoint line " + std::to_string(line_no) +
                             ": bad number '" + s + "'");
  }
  return value;
}

Pose Interpolate(const std::vector<Waypoint>& wps, double t) {
  if (t <= wps.front().t) return wps.front().pose;
  if (t >= wps.back().t) return wps.back().pose;
  const auto upper = std::upper_bound(
      wps.begin(), wps.end(), t,
      [](double value, const Waypoint& w) { return value < w.t; });
  const Waypoint& b = *upper;
  const Waypoint& a = *(upper - 1);
  const double u = (t - a.t) / (b.t - a.t);
  const Eigen::Quaterniond qa(a.pose.linear());
  const Eigen::Quaterniond qb(b.pose.linear());
  // Eigen's slerp already picks the hemisphere of the shorter arc.
  Pose pose = Pose::Identity();
  pose.linear() = qa.slerp(u, qb).normalized().toRotationMatrix();
  pose.translation() =
      (1.0 - u) * a.pose.translation() + u * b.pose.translation();
  return pose;
}

}  // namespace

Pose TestPath1(double t, double t_max) {
  CheckTime(t, t_max);
  const double s = 2.0 * kPi * t / t_max;
  return CirclePose(s - std::sin(s) - kPi);
}

Pose TestPath2(double t, double t_max) {
  CheckTime(t, t_max);
  return CirclePose(2.0 * kPi * t / t_max);
}

Pose EvaluateAnalyticPath(AnalyticPath path, double t, double t_max) {
  return path == AnalyticPath::kTest1 ? TestPath1(t, t_max)
                                      : TestPath2(t, t_max);
}

int SampleCount(double t_max, double t0) {
  if (!(t_max > 0.0) || !(t0 > 0.0)) {
    throw std::invalid_argument("t_max and t0 must be positive");
  }
  const double ratio = t_max / t0;
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio) ||
      n > 1e8) {
    throw std::invalid_argument("t_max / t0 = " + std::to_string(ratio) +
                                " is not a positive integer");
  }
  return static_cast<int>(n);
}

bool IsCircular(const std::vector<Pose>& poses) {
  if (poses.size() < 2) return false;
  const Eigen::Matrix4d diff = poses.front().matrix() - poses.back().matrix();
  return diff.cwiseAbs().maxCoeff() <= 1e-12;
}

SampledPath SamplePath(const PathSpec& spec) {
  SampledPath out;
  out.id = spec.id;
  out.t0 = spec.t0;
  if (spec.analytic) {
    const int n = SampleCount(spec.t_max, spec.t0);
    out.poses.reserve(n + 1);
    for (int i = 0; i <= n; ++i) {
      // The last sample lands on t_max exactly rather than n * t0.
      const double t = i == n ? spec.t_max : std::min(i * spec.t0, spec.t_max);
      out.poses.push_back(EvaluateAnalyticPath(*spec.analytic, t, spec.t_max));
    }
  } else {
    const auto& wps = spec.waypoints;
    if (wps.size() < 2) {
      throw std::invalid_argument("waypoint path needs at least 2 waypoints");
    }
    for (std::size_t k = 1; k < wps.size(); ++k) {
      if (!(wps[k].t > wps[k - 1].t)) {
        throw std::invalid_argument("waypoint times must strictly increase");
      }
    }
    const double t_begin = wps.front().t;
    const int n = SampleCount(wps.back().t - t_begin, spec.t0);
    out.poses.reserve(n + 1);
    for (int i = 0; i <= n; ++i) {
      const double t = i == n ? wps.back().t : t_begin + i * spec.t0;
      out.poses.push_back(Interpolate(wps, t));
    }
  }
  out.circular = IsCircular(out.poses);
  return out;
}

std::vector<Waypoint> ReadWaypointsCsv(std::istream& in) {
  std::string line;
  int line_no = 0;
  bool have_header = false;
  std::vector<Waypoint> out;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    auto fields = SplitCsvLine(trimmed);
    if (!have_header) {
      static const char* kHeader[] = {"t", "x", "y", "z", "qw", "qx", "qy",
                                      "qz"};
      bool ok = fields.size() == 8;
      for (std::size_t k = 0; ok && k < 8; ++k) {
        ok = Trim(fields[k]) == kHeader[k];
      }
      if (!ok) {
        throw std::runtime_error("waypoint file: expected header "
                                 "t,x,y,z,qw,qx,qy,qz");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 8) {
      throw std::runtime_error("waypoint line " + std::to_string(line_no) +
                               ": expected 8 fields");
    }
    double v[8];
    for (int k = 0; k < 8; ++k) v[k] = ParseDouble(fields[k], line_no);
    Eigen::Quaterniond q(v[4], v[5], v[6], v[7]);
    if (q.norm() < 1e-9) {
      throw std::runtime_error("waypoint line " + std::to_string(line_no) +
                               ": zero quaternion");
    }
    Waypoint w;
    w.t = v[0];
    w.pose.linear() = q.normalized().toRotationMatrix();
    w.pose.translation() << v[1], v[2], v[3];
    out.push_back(w);
  }
  if (!have_header) throw std::runtime_error("waypoint file: missing header");
  for (std::size_t k = 1; k < out.size(); ++k) {
    if (!(out[k].t > out[k - 1].t)) {
      throw std::invalid_argument("waypoint times must strictly increase");
    }
  }
  return out;
}

std::vector<Waypoint> ReadWaypointsCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  return ReadWaypointsCsv(in);
}

ParamGrid::ParamGrid(std::vector<double> values, int num_samples)
    : values_(std::move(values)), num_samples_(num_samples) {
  if (values_.size() < 2) throw std::invalid_argument("grid needs m >= 2");
  if (num_samples_ < 1) throw std::invalid_argument("grid needs samples");
  const std::size_t cells = static_cast<std::size_t>(num_samples_) *
                            values_.size();
  configs_.assign(cells * 7, 0.0);
  present_.assign(cells, 0);
}

double ParamGrid::delta() const {
  return (values_.back() - values_.front()) / (values_.size() - 1);
}

JointConfig ParamGrid::config(int i, int j) const {
  return Eigen::Map<const JointConfig>(data(i, j));
}

std::optional<JointConfig> ParamGrid::at(int i, int j) const {
  if (!present(i, j)) return std::nullopt;
  return config(i, j);
}

void ParamGrid::Set(int i, int j, const std::optional<JointConfig>& q) {
  const std::size_t cell = Cell(i, j);
  present_[cell] = q.has_value();
  double* dst = &configs_[cell * 7];
  for (int c = 0; c < 7; ++c) dst[c] = q ? (*q)(c) : 0.0;
}

std::vector<double> UniformParamValues(int m, const JointLimits& limits) {
  if (m < 2) throw std::invalid_argument("m must be at least 2");
  const double lo = limits.q_min(6);
  const double hi = limits.q_max(6);
  const double step = (hi - lo) / (m - 1);
  std::vector<double> values(m);
  for (int j = 0; j < m; ++j) values[j] = std::min(hi, lo + j * step);
  values.back() = hi;
  return values;
}

ParamGrid BuildParamGrid(const SampledPath& path, int m,
                         const RobotModel& model, int workers) {
  ParamGrid grid(UniformParamValues(m, model.limits),
                 static_cast<int>(path.poses.size()));
  const int rows = grid.num_samples();
  const int threads = std::clamp(workers, 1, std::max(1, rows));
  auto fill = [&](int first, int last) {
    for (int i = first; i < last; ++i) {
      for (int j = 0; j < m; ++j) {
        grid.Set(i, j, IkParam(path.poses[i], grid.value(j), model));
      }
    }
  };
  if (threads == 1) {
    fill(0, rows);
    return grid;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back(fill, rows * w / threads, rows * (w + 1) / threads);
  }
  for (auto& t : pool) t.join();
  return grid;
}

int VelocityBandHalfWidth(const ParamGrid& grid, const JointLimits& limits,
                          double t0) {
  // Small slack so an offset sitting exactly on the bound stays in the band;
  // the planner re-checks every pair with the exact inequality anyway.
  const double reach = limits.v_max(6) * t0 + 1e-12;
  const auto& a = grid.values();
  int w = 0;
  for (int j = 0; j < grid.m(); ++j) {
    int k = j;
    while (k + 1 < grid.m() && std::abs(a[k + 1] - a[j]) <= reach) ++k;
    w = std::max(w, k - j);
  }
  return w;
}

}  // namespace redres
