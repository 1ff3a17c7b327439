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


// Banded forward pass shared by the plain planner and the start optimizer.
// Not part of the public interface.

#ifndef REDRES_SRC_DP_ENGINE_H_
#define REDRES_SRC_DP_ENGINE_H_

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "redres/dp_planner.h"

namespace redres::internal {

// State values over the grid rows `rows`:
//   C(i, j, k): sample i at column j, reached continuously from column k.
//   B(i, j):    sample i at column j after a break; its value does not
//               depend on j, so one value per step is kept.
// Ties resolve toward the smallest (j_i, j_{i-1}, ...) read from the end,
// and toward the continuous state when even that ties.
template <class Policy>
class DpEngine {
 public:
  using Value = typename Policy::Value;
  // Called after every completed step; returning true stops the pass.
  using Observer = std::function<bool(int step, const DpEngine&)>;

  DpEngine(const ParamGrid& grid, std::vector<int> rows,
           const JointLimits& limits, double t0, Policy policy,
           const SolveOptions& options)
      : grid_(grid), limits_(limits), t0_(t0), policy_(std::move(policy)),
        options_(options) {
    tables_.rows = std::move(rows);
    tables_.steps = static_cast<int>(tables_.rows.size()) - 1;
    tables_.m = grid.m();
    tables_.band = VelocityBandHalfWidth(grid, limits, t0);
    if (tables_.steps < 0) throw std::invalid_argument("empty row sequence");
    if (tables_.band >= 32767) throw std::invalid_argument("band too wide");
    width_ = 2 * tables_.band + 1;
    for (int i = 0; i <= tables_.steps; ++i) {
      const int row = tables_.rows[i];
      if (row < 0 || row >= grid.num_samples()) {
        throw std::invalid_argument("row index out of range");
      }
      bool any = false;
      for (int j = 0; j < grid.m() && !any; ++j) any = Allowed(i, j);
      if (!any) {
        throw InfeasiblePathError(
            "sample " + std::to_string(row) +
                " has no inverse kinematics solution on the grid",
            row);
      }
    }
    if (options.pinned_start &&
        (*options.pinned_start < 0 || *options.pinned_start >= grid.m())) {
      throw std::invalid_argument("pinned start column out of range");
    }
  }

  void Run(const Observer& observer = nullptr) {
    const int n = tables_.steps;
    const int m = tables_.m;
    tables_.parent.assign(n + 1, {});
    tables_.break_pred.assign(n + 1, DpState{});
    tables_.break_feasible.assign(n + 1, false);
    break_value_.assign(n + 1, policy_.Infinite());
    cur_.assign(static_cast<std::size_t>(m) * width_, policy_.Infinite());
    prev_ = cur_;
    step_ = 0;
    if (n == 0) {
      FinishZeroSteps();
      return;
    }
    // Start states all carry the neutral value; the break into step 1
    // follows the smallest admissible first column.
    int first = -1;
    for (int j = 0; j < m && first < 0; ++j) {
      if (Allowed(0, j)) first = j;
    }
    best_ = policy_.Start();
    best_state_ = DpState{0, first, -1};
    for (int i = 1; i <= n; ++i) {
      std::swap(prev_, cur_);
      std::fill(cur_.begin(), cur_.end(), policy_.Infinite());
      tables_.parent[i].assign(static_cast<std::size_t>(m) * width_,
                               DpTables::kNoParent);
      break_value_[i] = policy_.Break(best_, i);
      tables_.break_pred[i] = best_state_;
      tables_.break_feasible[i] = true;
      ComputeStep(i);
      step_ = i;
      SelectBest(i);
      if (observer && observer(i, *this)) {
        stopped_early_ = true;
        return;
      }
    }
    SelectFinal();
  }

  // Accessors valid for the most recent step.
  int step() const { return step_; }
  int band() const { return tables_.band; }
  int m() const { return tables_.m; }
  bool Allowed(int step, int j) const {
    if (step == 0 && options_.pinned_start && j != *options_.pinned_start) {
      return false;
    }
    return grid_.present(tables_.rows[step], j);
  }
  const Value& Continuous(int j, int k) const { return cur_[Slot(j, k)]; }
  const Value& BreakValue(int step) const { return break_value_[step]; }
  const Policy& policy() const { return policy_; }
  // Column at step - 1 that the state's chosen history passes through.
  int NextIndex(const DpState& s) const {
    return s.is_break() ? tables_.break_pred[s.step].j : s.k;
  }

  // True when `a` precedes `b` in the tie-break order among equal values.
  bool TieBefore(const DpState& a, const DpState& b) const {
    if (a.j != b.j) return a.j < b.j;
    const int na = NextIndex(a);
    const int nb = NextIndex(b);
    if (na != nb) return na < nb;
    return !a.is_break() && b.is_break();
  }

  bool Better(const Value& va, const DpState& a, const Value& vb,
              const DpState& b) const {
    if (policy_.Less(va, vb)) return true;
    if (policy_.Less(vb, va)) return false;
    return TieBefore(a, b);
  }

  const DpTables& tables() const { return tables_; }
  DpTables& mutable_tables() { return tables_; }
  // Best value over all states of the most recent step.
  const Value& best_value() const { return best_; }
  const Value& final_value() const { return final_value_; }
  bool stopped_early() const { return stopped_early_; }

 private:
  std::size_t Slot(int j, int k) const {
    return static_cast<std::size_t>(j) * width_ + (k - j + tables_.band);
  }

  const double* Q(int step, int j) const {
    return grid_.data(tables_.rows[step], j);
  }

  bool VelocityOk(const double* qa, const double* qb) const {
    for (int c = 0; c < kNumJoints; ++c) {
      if (!(std::abs(qb[c] - qa[c]) <= limits_.v_max(c) * t0_)) return false;
    }
    return true;
  }

  bool AccelerationOk(const double* qa, const double* qb,
                      const double* qc) const {
    for (int c = 0; c < kNumJoints; ++c) {
      if (!(std::abs(qc[c] - 2.0 * qb[c] + qa[c]) <=
            limits_.a_max(c) * t0_ * t0_)) {
        return false;
      }
    }
    return true;
  }

  void ComputeStep(int i) {
    const int m = tables_.m;
    const int workers = std::clamp(options_.workers, 1, m);
    auto body = [&](int k_first, int k_last) {
      std::vector<std::pair<Value, int>> order;
      order.reserve(width_);
      for (int k = k_first; k < k_last; ++k) ComputeColumn(i, k, order);
    };
    if (workers == 1) {
      body(0, m);
      return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back(body, m * w / workers, m * (w + 1) / workers);
    }
    for (auto& t : pool) t.join();
  }

  // Fills every C(i, j, k) for one predecessor column k.
  void ComputeColumn(int i, int k, std::vector<std::pair<Value, int>>& order) {
    if (!Allowed(i - 1, k)) return;
    const int w = tables_.band;
    const int m = tables_.m;
    const double* qk = Q(i - 1, k);
    order.clear();
    if (i >= 2) {
      for (int p = std::max(0, k - w); p <= std::min(m - 1, k + w); ++p) {
        const Value& v = prev_[Slot(k, p)];
        if (policy_.IsFinite(v)) order.emplace_back(v, p);
      }
      std::sort(order.begin(), order.end(),
                [this](const auto& a, const auto& b) {
                  if (policy_.Less(a.first, b.first)) return true;
                  if (policy_.Less(b.first, a.first)) return false;
                  return a.second < b.second;
                });
    }
    const Value start = policy_.Start();
    const Value& from_break = break_value_[i - 1];
    const int break_next = i >= 2 ? tables_.break_pred[i - 1].j : -1;
    for (int j = std::max(0, k - w); j <= std::min(m - 1, k + w); ++j) {
      if (!Allowed(i, j)) continue;
      const double* qj = Q(i, j);
      if (!VelocityOk(qk, qj)) continue;
      const double cost = StepCost(qk, qj);
      const std::size_t slot = Slot(j, k);
      if (i == 1) {
        cur_[slot] = policy_.Continue(start, cost);
        continue;
      }
      const std::pair<Value, int>* chosen = nullptr;
      for (const auto& entry : order) {
        if (AccelerationOk(Q(i - 2, entry.second), qk, qj)) {
          chosen = &entry;
          break;
        }
      }
      bool use_break = true;
      if (chosen != nullptr) {
        if (policy_.Less(chosen->first, from_break)) {
          use_break = false;
        } else if (!policy_.Less(from_break, chosen->first)) {
          use_break = chosen->second > break_next;
        }
      }
      if (use_break) {
        cur_[slot] = policy_.Continue(from_break, cost);
        tables_.parent[i][slot] = DpTables::kFromBreak;
      } else {
        cur_[slot] = policy_.Continue(chosen->first, cost);
        tables_.parent[i][slot] =
            static_cast<std::int16_t>(chosen->second - k);
      }
    }
  }

  // Best state at step i in value-then-tie order, over C and B states.
  void SelectBest(int i) {
    const int m = tables_.m;
    const int w = tables_.band;
    bool have = false;
    Value best = policy_.Infinite();
    DpState best_state;
    for (int j = 0; j < m; ++j) {
      if (!Allowed(i, j)) continue;
      for (int k = std::max(0, j - w); k <= std::min(m - 1, j + w); ++k) {
        const Value& v = cur_[Slot(j, k)];
        if (!policy_.IsFinite(v)) continue;
        const DpState s{i, j, k};
        if (!have || Better(v, s, best, best_state)) {
          best = v;
          best_state = s;
          have = true;
        }
      }
      const DpState b{i, j, -1};
      if (!have || Better(break_value_[i], b, best, best_state)) {
        best = break_value_[i];
        best_state = b;
        have = true;
      }
    }
    best_ = best;
    best_state_ = best_state;
  }

  void SelectFinal() {
    final_value_ = best_;
    tables_.final_state = best_state_;
    tables_.feasible = true;
  }

  void FinishZeroSteps() {
    for (int j = 0; j < tables_.m; ++j) {
      if (Allowed(0, j)) {
        final_value_ = policy_.Start();
        tables_.final_state = DpState{0, j, -1};
        tables_.feasible = true;
        return;
      }
    }
  }

  const ParamGrid& grid_;
  const JointLimits& limits_;
  double t0_;
  Policy policy_;
  SolveOptions options_;
  DpTables tables_;
  int width_ = 1;
  int step_ = 0;
  std::vector<Value> cur_, prev_;
  std::vector<Value> break_value_;
  Value best_{};
  DpState best_state_;
  Value final_value_{};
  bool stopped_early_ = false;
};

}  // namespace redres::internal

#endif  // REDRES_SRC_DP_ENGINE_H_
