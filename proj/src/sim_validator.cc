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

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "redres/format.h"

namespace redres {
namespace {

void Accumulate(ErrorStats& stats) {
  const auto n = static_cast<double>(stats.translation.size());
  if (stats.translation.empty()) return;
  double sum = 0.0;
  double rot_sum = 0.0;
  for (std::size_t s = 0; s < stats.translation.size(); ++s) {
    sum += stats.translation[s];
    rot_sum += stats.rotation[s];
    stats.max = std::max(stats.max, stats.translation[s]);
    stats.rotation_max = std::max(stats.rotation_max, stats.rotation[s]);
  }
  stats.mean = sum / n;
  stats.rotation_mean = rot_sum / n;
}

void AddError(ErrorStats& stats, const Pose& reached, const Pose& desired) {
  stats.translation.push_back(
      (reached.translation() - desired.translation()).norm());
  stats.rotation.push_back(
      RotationDistance(reached.linear(), desired.linear()));
}

int PoseIndex(const std::vector<int>& pose_index, int s) {
  return pose_index.empty() ? s : pose_index[s];
}

class Enumerator {
 public:
  Enumerator(const ParamGrid& grid, const JointLimits& limits,
             const LossParams& lp)
      : grid_(grid), limits_(limits), lp_(lp), n_(grid.n()),
        idx_(n_ + 1), cont_(n_ + 1, true) {}

  bool Run() {
    for (int j = 0; j < grid_.m(); ++j) {
      if (!grid_.present(0, j)) continue;
      idx_[0] = j;
      Extend(0, 0.0);
    }
    return found_;
  }

  double best_loss() const { return best_loss_; }
  const std::vector<int>& best_idx() const { return best_idx_; }
  const std::vector<bool>& best_cont() const { return best_cont_; }

 private:
  JointConfig Q(int i, int j) const { return grid_.config(i, j); }

  void Extend(int i, double loss) {
    if (i == n_) {
      Offer(loss);
      return;
    }
    const int next = i + 1;
    for (int j = 0; j < grid_.m(); ++j) {
      if (!grid_.present(next, j)) continue;
      idx_[next] = j;
      cont_[next] = false;
      Extend(next, loss + lp_.big_m);
      const JointConfig qa = Q(i, idx_[i]);
      const JointConfig qb = Q(next, j);
      if (!CheckVelocity(qa, qb, limits_, lp_.t0)) continue;
      if (i >= 1 && cont_[i] &&
          !CheckAcceleration(Q(i - 1, idx_[i - 1]), qa, qb, limits_, lp_.t0)) {
        continue;
      }
      cont_[next] = true;
      Extend(next, loss + StepCost(qa.data(), qb.data()));
    }
  }

  // Minimal loss first; then the smallest index sequence read from the
  // last sample backwards; then continuous steps before breaks, again read
  // from the end.
  void Offer(double loss) {
    bool take = !found_ || loss < best_loss_;
    if (!take && loss == best_loss_) {
      int order = 0;
      for (int i = n_; i >= 0 && order == 0; --i) {
        if (idx_[i] != best_idx_[i]) order = idx_[i] < best_idx_[i] ? -1 : 1;
      }
      for (int i = n_; i >= 1 && order == 0; --i) {
        if (cont_[i] != best_cont_[i]) order = cont_[i] ? -1 : 1;
      }
      take = order < 0;
    }
    if (take) {
      found_ = true;
      best_loss_ = loss;
      best_idx_ = idx_;
      best_cont_ = cont_;
    }
  }

  const ParamGrid& grid_;
  const JointLimits& limits_;
  const LossParams& lp_;
  int n_;
  std::vector<int> idx_;
  std::vector<bool> cont_;
  bool found_ = false;
  double best_loss_ = 0.0;
  std::vector<int> best_idx_;
  std::vector<bool> best_cont_;
};

}  // namespace

Trace Replay(const Plan& plan, const RobotModel& model, double t0_cycle) {
  Trace trace;
  trace.stream = Follow(plan, model.limits, t0_cycle);
  trace.pose_index = plan.pose_index;
  for (long long r : trace.stream.sample_record) {
    trace.sample_poses.push_back(
        ForwardKinematics(trace.stream.records[r].state.q, model));
  }
  return trace;
}

ConstraintReport ValidateConstraints(const Stream& stream,
                                     const JointLimits& limits) {
  ConstraintReport report;
  const auto& recs = stream.records;
  report.cycles = static_cast<long long>(recs.size());
  if (recs.empty()) return report;
  const double t0 = stream.t0_cycle;
  double scale = 1.0;
  for (const auto& r : recs) {
    scale = std::max(scale, 1.0 + r.state.q.cwiseAbs().maxCoeff());
  }
  const double eps = std::numeric_limits<double>::epsilon();
  const double tol_v = kRoundOffFactor * eps * scale / t0;
  const double tol_a = tol_v / t0;
  const double tol_j = tol_a / t0;

  auto check = [&](long long r, int c, char kind, double value, double bound,
                   double tol) {
    if (std::abs(value) > bound + tol) {
      report.violations.push_back({r, c, kind, value, bound});
    }
  };
  auto extrema = [](double x, double bound, double& lo, double& hi) {
    lo = std::min(lo, x / bound);
    hi = std::max(hi, x / bound);
  };

  std::vector<long long> starts = stream.segment_start;
  if (starts.empty() || starts.front() != 0) starts.insert(starts.begin(), 0);
  for (std::size_t g = 0; g < starts.size(); ++g) {
    const long long begin = starts[g];
    const long long end = g + 1 < starts.size()
                              ? starts[g + 1]
                              : static_cast<long long>(recs.size());
    JointConfig v_prev = JointConfig::Zero();
    JointConfig a_prev = JointConfig::Zero();
    for (long long r = begin; r < end; ++r) {
      const JointConfig& q = recs[r].state.q;
      for (int c = 0; c < kNumJoints; ++c) {
        if (q(c) < limits.q_min(c) || q(c) > limits.q_max(c)) {
          report.violations.push_back(
              {r, c, 'q', q(c), q(c) < limits.q_min(c) ? limits.q_min(c)
                                                        : limits.q_max(c)});
        }
      }
      if (r == begin) continue;
      const JointConfig v = (q - recs[r - 1].state.q) / t0;
      const JointConfig a = (v - v_prev) / t0;
      const JointConfig j = (a - a_prev) / t0;
      for (int c = 0; c < kNumJoints; ++c) {
        check(r, c, 'v', v(c), limits.v_max(c), tol_v);
        check(r, c, 'a', a(c), limits.a_max(c), tol_a);
        check(r, c, 'j', j(c), limits.j_max(c), tol_j);
        extrema(v(c), limits.v_max(c), report.v_min_norm(c),
                report.v_max_norm(c));
        extrema(a(c), limits.a_max(c), report.a_min_norm(c),
                report.a_max_norm(c));
        extrema(j(c), limits.j_max(c), report.j_min_norm(c),
                report.j_max_norm(c));
      }
      v_prev = v;
      a_prev = a;
    }
    // Differences at the last record of the segment.
    report.terminal_v =
        std::max(report.terminal_v, v_prev.cwiseAbs().maxCoeff());
    report.terminal_a =
        std::max(report.terminal_a, a_prev.cwiseAbs().maxCoeff());
  }
  return report;
}

std::vector<Violation> CheckPlan(const Plan& plan, const JointLimits& limits) {
  std::vector<Violation> out;
  const double t0 = plan.t0;
  for (int i = 0; i <= plan.n(); ++i) {
    const JointConfig& q = plan.joints[i];
    for (int c = 0; c < kNumJoints; ++c) {
      if (q(c) < limits.q_min(c) || q(c) > limits.q_max(c)) {
        out.push_back({i, c, 'q', q(c),
                       q(c) < limits.q_min(c) ? limits.q_min(c)
                                              : limits.q_max(c)});
      }
    }
    if (i == 0 || !plan.cont[i]) continue;
    const JointConfig step = q - plan.joints[i - 1];
    for (int c = 0; c < kNumJoints; ++c) {
      if (!(std::abs(step(c)) <= limits.v_max(c) * t0)) {
        out.push_back({i, c, 'v', step(c) / t0, limits.v_max(c)});
      }
    }
    if (i < 2 || !plan.cont[i - 1]) continue;
    const JointConfig second =
        q - 2.0 * plan.joints[i - 1] + plan.joints[i - 2];
    for (int c = 0; c < kNumJoints; ++c) {
      if (!(std::abs(second(c)) <= limits.a_max(c) * t0 * t0)) {
        out.push_back({i, c, 'a', second(c) / (t0 * t0), limits.a_max(c)});
      }
    }
  }
  return out;
}

void WriteConstraintReport(const ConstraintReport& report, std::ostream& out) {
  out << "cycles=" << report.cycles
      << " violations=" << report.violations.size()
      << " terminal_v=" << FormatDouble(report.terminal_v)
      << " terminal_a=" << FormatDouble(report.terminal_a) << '\n';
  out << "joint,v_min,v_max,a_min,a_max,j_min,j_max\n";
  for (int c = 0; c < kNumJoints; ++c) {
    out << c + 1 << ',' << FormatDouble(report.v_min_norm(c)) << ','
        << FormatDouble(report.v_max_norm(c)) << ','
        << FormatDouble(report.a_min_norm(c)) << ','
        << FormatDouble(report.a_max_norm(c)) << ','
        << FormatDouble(report.j_min_norm(c)) << ','
        << FormatDouble(report.j_max_norm(c)) << '\n';
  }
  for (const Violation& v : report.violations) {
    out << "violation record=" << v.record << " joint=" << v.joint + 1
        << " kind=" << v.kind << " value=" << FormatDouble(v.value)
        << " bound=" << FormatDouble(v.bound) << '\n';
  }
}

ErrorStats CartesianError(const Trace& trace, const SampledPath& path) {
  ErrorStats stats;
  for (std::size_t s = 0; s < trace.sample_poses.size(); ++s) {
    const int p = PoseIndex(trace.pose_index, static_cast<int>(s));
    if (p < 0 || p >= static_cast<int>(path.poses.size())) {
      throw std::invalid_argument("trace does not cover the path");
    }
    AddError(stats, trace.sample_poses[s], path.poses[p]);
  }
  Accumulate(stats);
  return stats;
}

ErrorStats PlanError(const Plan& plan, const SampledPath& path,
                     const RobotModel& model) {
  ErrorStats stats;
  for (int s = 0; s <= plan.n(); ++s) {
    const int p = PoseIndex(plan.pose_index, s);
    if (p < 0 || p >= static_cast<int>(path.poses.size())) {
      throw std::invalid_argument("plan does not cover the path");
    }
    AddError(stats, ForwardKinematics(plan.joints[s], model), path.poses[p]);
  }
  Accumulate(stats);
  return stats;
}

void WriteStreamCsv(const Stream& stream, std::ostream& out) {
  out << "cycle,t,q1,q2,q3,q4,q5,q6,q7\n";
  std::string line;
  for (const CycleRecord& r : stream.records) {
    line = std::to_string(r.cycle) + ',' +
           FormatDouble(static_cast<double>(r.cycle) * stream.t0_cycle);
    for (int c = 0; c < kNumJoints; ++c) {
      line += ',' + FormatDouble(r.state.q(c));
    }
    line += '\n';
    out << line;
  }
}

void WriteErrorCsv(const ErrorStats& stats, std::ostream& out) {
  out << "i,translation,rotation\n";
  for (std::size_t s = 0; s < stats.translation.size(); ++s) {
    out << s << ',' << FormatDouble(stats.translation[s]) << ','
        << FormatDouble(stats.rotation[s]) << '\n';
  }
  out << "# mean=" << FormatDouble(stats.mean)
      << " max=" << FormatDouble(stats.max) << '\n';
}

GreedyResult GreedyBaseline(const ParamGrid& grid, const JointLimits& limits,
                            double t0, int start_column) {
  GreedyResult result;
  Plan& plan = result.plan;
  plan.t0 = t0;
  if (start_column < 0 || start_column >= grid.m() ||
      !grid.present(0, start_column)) {
    result.halted_at = 0;
    return result;
  }
  const int w = VelocityBandHalfWidth(grid, limits, t0);
  int j = start_column;
  plan.joints.push_back(grid.config(0, j));
  plan.indices.push_back(j);
  plan.cont.push_back(true);
  plan.pose_index.push_back(0);
  for (int i = 1; i <= grid.n(); ++i) {
    const JointConfig& qa = plan.joints.back();
    int pick = -1;
    double pick_cost = 0.0;
    for (int c = std::max(0, j - w); c <= std::min(grid.m() - 1, j + w); ++c) {
      if (!grid.present(i, c)) continue;
      const JointConfig qb = grid.config(i, c);
      if (!CheckVelocity(qa, qb, limits, t0)) continue;
      if (i >= 2 &&
          !CheckAcceleration(plan.joints[i - 2], qa, qb, limits, t0)) {
        continue;
      }
      const double cost = StepCost(qa.data(), qb.data());
      if (pick < 0 || cost < pick_cost) {
        pick = c;
        pick_cost = cost;
      }
    }
    if (pick < 0) {
      result.halted_at = i;
      return result;
    }
    j = pick;
    plan.loss += pick_cost;
    plan.joints.push_back(grid.config(i, j));
    plan.indices.push_back(j);
    plan.cont.push_back(true);
    plan.pose_index.push_back(i);
  }
  result.completed = true;
  return result;
}

Plan BruteForceSolve(const ParamGrid& grid, const JointLimits& limits,
                     const LossParams& lp) {
  if (std::pow(static_cast<double>(grid.m()), grid.num_samples()) > 1e7) {
    throw std::invalid_argument("instance too large for exhaustive search");
  }
  Enumerator search(grid, limits, lp);
  if (!search.Run()) {
    throw InfeasiblePathError("no index sequence reaches every sample", -1);
  }
  Plan plan;
  plan.t0 = lp.t0;
  plan.indices = search.best_idx();
  plan.cont = search.best_cont();
  for (int i = 0; i <= grid.n(); ++i) {
    plan.joints.push_back(grid.config(i, plan.indices[i]));
    plan.pose_index.push_back(i);
  }
  plan.loss = search.best_loss();
  plan.breakpoints = static_cast<int>(
      std::count(plan.cont.begin() + 1, plan.cont.end(), false));
  return plan;
}

}  // namespace redres
