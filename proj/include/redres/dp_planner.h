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


#ifndef REDRES_DP_PLANNER_H_
#define REDRES_DP_PLANNER_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "redres/kinematics.h"
#include "redres/path_model.h"

namespace redres {

// Raised when some sample has no inverse-kinematics solution at all.
class InfeasiblePathError : public std::runtime_error {
 public:
  InfeasiblePathError(const std::string& what, int sample)
      : std::runtime_error(what), sample_(sample) {}
  int sample() const { return sample_; }

 private:
  int sample_;
};

struct LossParams {
  double big_m = 0.0;
  double t0 = 0.0;
};

// n * ||q_max - q_min||^2, the largest distance sum a plan over n steps
// can accumulate.
double DistanceBound(int n, const JointLimits& limits);

// Throws std::invalid_argument unless M > n * ||q_max - q_min||^2 and
// t0 > 0.
LossParams MakeLossParams(double big_m, double t0, int n,
                          const JointLimits& limits);

// 1.01 * n * ||q_max - q_min||^2.
double AutoPenalty(int n, const JointLimits& limits);

bool CheckVelocity(const JointConfig& qa, const JointConfig& qb,
                   const JointLimits& limits, double t0);
bool CheckAcceleration(const JointConfig& qa, const JointConfig& qb,
                       const JointConfig& qc, const JointLimits& limits,
                       double t0);

// Squared joint distance of one continuous step. Planner and oracles share
// it so that losses agree bit for bit.
inline double StepCost(const double* qa, const double* qb) {
  double sum = 0.0;
  for (int c = 0; c < kNumJoints; ++c) {
    const double d = qb[c] - qa[c];
    sum += d * d;
  }
  return sum;
}

int BreakpointCount(double loss, double big_m);

struct Plan {
  std::vector<JointConfig> joints;
  // Grid column chosen at each sample.
  std::vector<int> indices;
  // cont[i] describes the step from sample i - 1 to i; cont[0] is unused
  // and always true.
  std::vector<bool> cont;
  // Original path pose index of each sample (identity unless re-based).
  std::vector<int> pose_index;
  double loss = 0.0;
  int breakpoints = 0;
  double t0 = 0.0;

  int n() const { return static_cast<int>(joints.size()) - 1; }
};

// Sum over steps of the step cost (continuous) or M (broken), accumulated
// from the first step on.
double PlanLoss(const Plan& plan, double big_m);

struct SolveOptions {
  int workers = 1;
  // Forces the first sample onto this grid column.
  std::optional<int> pinned_start;
};

// Forward-pass cost bookkeeping. Value must be totally ordered by Less.
struct ScalarLoss {
  using Value = double;
  double big_m = 0.0;

  Value Infinite() const;
  Value Start() const { return 0.0; }
  Value Continue(Value prev, double step_cost) const {
    return prev + step_cost;
  }
  Value Break(Value prev, int /*step*/) const { return prev + big_m; }
  bool Less(Value a, Value b) const { return a < b; }
  bool IsFinite(Value v) const;
};

// One state of the band tables as seen by an observer or backtracking.
struct DpState {
  int step = 0;
  int j = 0;
  // k = column at step - 1 for a continuous state, -1 for a break state.
  int k = -1;

  bool is_break() const { return k < 0; }
};

// Everything the backward pass needs, for the scalar loss.
struct DpTables {
  int steps = 0;        // number of steps N (samples 0..N)
  int m = 0;
  int band = 0;         // half-width w
  std::vector<int> rows;  // grid row of every logical sample
  // parent[i][j * (2w+1) + (k - j + w)]: offset p - k, kFromBreak, kNoParent.
  std::vector<std::vector<std::int16_t>> parent;
  // Predecessor state of the break state at each step (index 0 unused).
  std::vector<DpState> break_pred;
  std::vector<bool> break_feasible;
  DpState final_state;
  double final_value = 0.0;
  bool feasible = false;

  static constexpr std::int16_t kFromBreak = 32767;
  static constexpr std::int16_t kNoParent = -32768;
};

// Rows of the doubled circular path: 0..n followed by 1..n.
std::vector<int> IdentityRows(int num_samples);
std::vector<int> DoubledRows(int n);

// Optimal plan over the given row sequence (defaults to every grid row).
// Throws InfeasiblePathError on an all-absent column, std::invalid_argument
// on a bad configuration.
Plan Solve(const ParamGrid& grid, const JointLimits& limits,
           const LossParams& lp, const SolveOptions& options = {});

// Forward pass only.
DpTables SolveTables(const ParamGrid& grid, const std::vector<int>& rows,
                     const JointLimits& limits, const LossParams& lp,
                     const SolveOptions& options = {});

// Reconstructs samples 0..end.step from tables; throws std::logic_error on
// inconsistent tables.
Plan Backtrack(const DpTables& tables, const ParamGrid& grid,
               const LossParams& lp);
Plan Backtrack(const DpTables& tables, const ParamGrid& grid,
               const LossParams& lp, const DpState& end);

// CSV: header i,t,q1..q7,cont followed by "# loss=" and "# breakpoints="
// lines. Re-based plans carry an extra "# start=" line.
void WritePlanCsv(const Plan& plan, std::ostream& out, int start_index = 0);
Plan ReadPlanCsv(std::istream& in);

}  // namespace redres

#endif  // REDRES_DP_PLANNER_H_
