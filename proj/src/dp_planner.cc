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


#include "redres/dp_planner.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "dp_engine.h"
#include "redres/format.h"

namespace redres {

double DistanceBound(int n, const JointLimits& limits) {
  return n * (limits.q_max - limits.q_min).squaredNorm();
}

LossParams MakeLossParams(double big_m, double t0, int n,
                          const JointLimits& limits) {
  if (!(t0 > 0.0) || !std::isfinite(t0)) {
    throw std::invalid_argument("t0 must be positive");
  }
  const double bound = DistanceBound(n, limits);
  if (!(big_m > bound) || !std::isfinite(big_m)) {
    throw std::invalid_argument("M = " + FormatDouble(big_m) +
                                " must exceed " + FormatDouble(bound));
  }
  return LossParams{big_m, t0};
}

double AutoPenalty(int n, const JointLimits& limits) {
  return 1.01 * DistanceBound(std::max(n, 1), limits);
}

bool CheckVelocity(const JointConfig& qa, const JointConfig& qb,
                   const JointLimits& limits, double t0) {
  for (int c = 0; c < kNumJoints; ++c) {
    if (!(std::abs(qb(c) - qa(c)) <= limits.v_max(c) * t0)) return false;
  }
  return true;
}

bool CheckAcceleration(const JointConfig& qa, const JointConfig& qb,
                       const JointConfig& qc, const JointLimits& limits,
                       double t0) {
  for (int c = 0; c < kNumJoints; ++c) {
    if (!(std::abs(qc(c) - 2.0 * qb(c) + qa(c)) <=
          limits.a_max(c) * t0 * t0)) {
      return false;
    }
  }
  return true;
}

int BreakpointCount(double loss, double big_m) {
  if (!std::isfinite(loss) || !(big_m > 0.0)) {
    throw std::invalid_argument("breakpoint count needs finite loss and M");
  }
  double k = std::floor(loss / big_m);
  // The quotient can land one ulp on the wrong side of an integer.
  while ((k + 1.0) * big_m <= loss) k += 1.0;
  while (k > 0.0 && k * big_m > loss) k -= 1.0;
  return static_cast<int>(k);
}

double PlanLoss(const Plan& plan, double big_m) {
  double loss = 0.0;
  for (int i = 1; i <= plan.n(); ++i) {
    loss = plan.cont[i] ? loss + StepCost(plan.joints[i - 1].data(),
                                          plan.joints[i].data())
                        : loss + big_m;
  }
  return loss;
}

ScalarLoss::Value ScalarLoss::Infinite() const {
  return std::numeric_limits<double>::infinity();
}

bool ScalarLoss::IsFinite(Value v) const { return std::isfinite(v); }

std::vector<int> IdentityRows(int num_samples) {
  std::vector<int> rows(num_samples);
  for (int i = 0; i < num_samples; ++i) rows[i] = i;
  return rows;
}

std::vector<int> DoubledRows(int n) {
  std::vector<int> rows(2 * n + 1);
  for (int i = 0; i <= 2 * n; ++i) rows[i] = i <= n ? i : i - n;
  return rows;
}

DpTables SolveTables(const ParamGrid& grid, const std::vector<int>& rows,
                     const JointLimits& limits, const LossParams& lp,
                     const SolveOptions& options) {
  internal::DpEngine<ScalarLoss> engine(grid, rows, limits, lp.t0,
                                        ScalarLoss{lp.big_m}, options);
  engine.Run();
  DpTables tables = std::move(engine.mutable_tables());
  tables.final_value = engine.final_value();
  return tables;
}

Plan Solve(const ParamGrid& grid, const JointLimits& limits,
           const LossParams& lp, const SolveOptions& options) {
  if (!(lp.big_m > DistanceBound(grid.n(), limits))) {
    throw std::invalid_argument("M too small for this path length");
  }
  const DpTables tables =
      SolveTables(grid, IdentityRows(grid.num_samples()), limits, lp, options);
  return Backtrack(tables, grid, lp);
}

Plan Backtrack(const DpTables& tables, const ParamGrid& grid,
               const LossParams& lp) {
  if (!tables.feasible) throw std::logic_error("tables hold no finite plan");
  return Backtrack(tables, grid, lp, tables.final_state);
}

Plan Backtrack(const DpTables& tables, const ParamGrid& grid,
               const LossParams& lp, const DpState& end) {
  const int last = end.step;
  if (last < 0 || last > tables.steps ||
      static_cast<int>(tables.parent.size()) <= last) {
    throw std::logic_error("backtrack: end state outside the tables");
  }
  const int w = tables.band;
  const int width = 2 * w + 1;
  std::vector<int> idx(last + 1, -1);
  std::vector<bool> cont(last + 1, true);
  DpState s = end;
  while (s.step > 0) {
    idx[s.step] = s.j;
    if (s.is_break()) {
      cont[s.step] = false;
      const DpState pred = tables.break_pred[s.step];
      if (!tables.break_feasible[s.step] || pred.step != s.step - 1) {
        throw std::logic_error("backtrack: broken break predecessor");
      }
      s = pred;
      continue;
    }
    if (std::abs(s.k - s.j) > w || s.k < 0 || s.k >= tables.m) {
      throw std::logic_error("backtrack: state outside the band");
    }
    const std::int16_t code =
        tables.parent[s.step][static_cast<std::size_t>(s.j) * width +
                              (s.k - s.j + w)];
    if (s.step == 1) {
      s = DpState{0, s.k, -1};
    } else if (code == DpTables::kFromBreak) {
      s = DpState{s.step - 1, s.k, -1};
    } else if (code == DpTables::kNoParent || std::abs(code) > w) {
      throw std::logic_error("backtrack: missing parent");
    } else {
      s = DpState{s.step - 1, s.k, s.k + code};
    }
  }
  idx[0] = s.j;

  Plan plan;
  plan.t0 = lp.t0;
  plan.indices = idx;
  plan.cont = cont;
  for (int i = 0; i <= last; ++i) {
    const int row = tables.rows[i];
    if (idx[i] < 0 || !grid.present(row, idx[i])) {
      throw std::logic_error("backtrack: path through an absent cell");
    }
    plan.joints.push_back(grid.config(row, idx[i]));
    plan.pose_index.push_back(row);
  }
  plan.loss = PlanLoss(plan, lp.big_m);
  plan.breakpoints = static_cast<int>(
      std::count(plan.cont.begin() + 1, plan.cont.end(), false));
  return plan;
}

void WritePlanCsv(const Plan& plan, std::ostream& out, int start_index) {
  out << "i,t,q1,q2,q3,q4,q5,q6,q7,cont\n";
  std::string line;
  for (int i = 0; i <= plan.n(); ++i) {
    line = std::to_string(i) + ',' + FormatDouble(i * plan.t0);
    for (int c = 0; c < kNumJoints; ++c) {
      line += ',' + FormatDouble(plan.joints[i](c));
    }
    line += plan.cont[i] ? ",1\n" : ",0\n";
    out << line;
  }
  out << "# loss=" << FormatDouble(plan.loss) << '\n'
      << "# breakpoints=" << plan.breakpoints << '\n';
  if (start_index != 0) out << "# start=" << start_index << '\n';
}

Plan ReadPlanCsv(std::istream& in) {
  Plan plan;
  std::string line;
  bool header = false;
  int start = 0;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string token;
      meta >> token;
      const auto eq = token.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = token.substr(0, eq);
      const std::string value = token.substr(eq + 1);
      try {
        if (key == "loss") plan.loss = std::stod(value);
        if (key == "breakpoints") plan.breakpoints = std::stoi(value);
        if (key == "start") start = std::stoi(value);
      } catch (const std::exception&) {
        throw std::runtime_error("plan csv: bad metadata line " +
                                 std::to_string(line_no));
      }
      continue;
    }
    if (!header) {
      if (line != "i,t,q1,q2,q3,q4,q5,q6,q7,cont") {
        throw std::runtime_error("plan csv: unexpected header");
      }
      header = true;
      continue;
    }
    std::vector<double> v;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(field, &used));
        if (used != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw std::runtime_error("plan csv: bad number on line " +
                                 std::to_string(line_no));
      }
    }
    if (v.size() != 10 ||
        static_cast<int>(v[0]) != static_cast<int>(plan.joints.size())) {
      throw std::runtime_error("plan csv: malformed row on line " +
                               std::to_string(line_no));
    }
    if (plan.joints.size() == 1) plan.t0 = v[1];
    JointConfig q;
    for (int c = 0; c < kNumJoints; ++c) q(c) = v[2 + c];
    plan.joints.push_back(q);
    plan.cont.push_back(v[9] != 0.0);
    plan.indices.push_back(-1);
  }
  if (plan.joints.empty()) throw std::runtime_error("plan csv: no samples");
  const int n = plan.n();
  for (int i = 0; i <= n; ++i) {
    plan.pose_index.push_back(n > 0 && start + i > n ? start + i - n
                                                     : start + i);
  }
  return plan;
}

}  // namespace redres
