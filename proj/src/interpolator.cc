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

#include "redres/interpolator.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace redres {
namespace {

// Relative slack for the loop's violation tests, so that a value sitting on
// a bound after recomputation does not bounce between two clamps.
constexpr double kLoopSlack = 1e-12;

constexpr long long kSettleCycleCap = 100000;

constexpr int kSearchSteps = 80;

struct Interval {
  double lo;
  double hi;
};

// Largest a such that the velocity after this cycle, plus the rise while
// the acceleration steps down by j_max t0 per cycle, stays below v_max.
// With u = j_max t0 and K = floor(a / u) the rise is
// t0 (K a - u K (K + 1) / 2).
double AccelUpper(double v, double t0, double v_max, double j_max) {
  const double room = v_max - v;
  if (room < 0.0) return room / t0;
  const double u = j_max * t0;
  // Largest K with t0 u K (K + 1) / 2 <= room.
  const double x = room / (t0 * u);
  double k = std::floor((std::sqrt(1.0 + 8.0 * x) - 1.0) / 2.0);
  while (k > 0.0 && k * (k + 1.0) / 2.0 > x) k -= 1.0;
  while ((k + 1.0) * (k + 2.0) / 2.0 <= x) k += 1.0;
  return (room / t0 + u * k * (k + 1.0) / 2.0) / (k + 1.0);
}

Interval VelocityInterval(double v, double t0, double v_max, double j_max) {
  return {-AccelUpper(-v, t0, v_max, j_max), AccelUpper(v, t0, v_max, j_max)};
}

double Exceeds(double value, double bound) {
  return std::abs(value) > bound * (1.0 + kLoopSlack) + 1e-300;
}

double Sign(double x) { return x < 0.0 ? -1.0 : 1.0; }

// Shrinks `cur` to its overlap with `next`, or to the point of `cur`
// nearest `next` when they do not overlap. Returns false in that case.
bool Restrict(Interval& cur, const Interval& next) {
  const double lo = std::max(cur.lo, next.lo);
  const double hi = std::min(cur.hi, next.hi);
  if (lo <= hi) {
    cur = {lo, hi};
    return true;
  }
  const double point = next.hi < cur.lo ? cur.lo : cur.hi;
  cur = {point, point};
  return false;
}

// Time to rest after a cycle that ends with acceleration a.
double StopTimeAfter(double a, double v_now, double t0, double a_max,
                     double j_max) {
  return StopTime(v_now + a * t0, a, a_max, j_max);
}

// Part of `cur` from which rest stays reachable within `budget`, or the
// point of `cur` closest to that when no part qualifies. The stop time is
// quasi-convex in the acceleration, so a golden-section search for the
// minimum and a bisection on each side suffice.
Interval StopInterval(const Interval& cur, double v_now, double t0,
                      double a_max, double j_max, double budget) {
  auto f = [&](double a) { return StopTimeAfter(a, v_now, t0, a_max, j_max); };
  if (!std::isfinite(budget) || (f(cur.lo) <= budget && f(cur.hi) <= budget)) {
    return cur;
  }
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = cur.lo;
  double hi = cur.hi;
  for (int k = 0; k < kSearchSteps && hi > lo; ++k) {
    const double x1 = hi - g * (hi - lo);
    const double x2 = lo + g * (hi - lo);
    if (f(x1) <= f(x2)) {
      hi = x2;
    } else {
      lo = x1;
    }
  }
  const double best = 0.5 * (lo + hi);
  if (f(best) > budget) return {best, best};
  auto edge = [&](double inside, double outside) {
    if (f(outside) <= budget) return outside;
    for (int k = 0; k < kSearchSteps; ++k) {
      const double mid = 0.5 * (inside + outside);
      (f(mid) <= budget ? inside : outside) = mid;
    }
    return inside;
  };
  return {edge(best, cur.lo), edge(best, cur.hi)};
}

// Jerk, acceleration and velocity interval for one joint. Returns false
// when they do not overlap, leaving the priority projection in `cur`.
bool HardInterval(const ActuatorState& s, int c, double t0,
                  const EffectiveLimits& lim, Interval& cur) {
  const double reach = lim.j_max(c) * t0;
  cur = {s.a(c) - reach, s.a(c) + reach};
  bool ok = Restrict(cur, {-lim.a_max(c), lim.a_max(c)});
  ok = Restrict(cur, VelocityInterval(s.v(c), t0, lim.v_max(c),
                                      lim.j_max(c))) && ok;
  return ok;
}

Interval StopInterval(const Interval& cur, const ActuatorState& s, int c,
                      double t0, const EffectiveLimits& lim) {
  return StopInterval(cur, s.v(c), t0, lim.a_max(c), lim.j_max(c),
                      lim.stop_time);
}

struct Desired {
  double v;
  double a;
};

Desired DesiredMotion(double q, double v, double target, double t_r,
                      double t0) {
  const double v_d = (target - q) / t_r;
  return {v_d, (v_d - v) / t0};
}

void Emit(CycleCommand& cmd, int c, const ActuatorState& s, double a,
          double t0, const EffectiveLimits& lim, bool feasible) {
  double j = (a - s.a(c)) / t0;
  double v = s.v(c) + a * t0;
  // Remove round-off left by the recomputation; the bounds hold exactly.
  j = std::clamp(j, -lim.j_max(c), lim.j_max(c));
  a = std::clamp(a, -lim.a_max(c), lim.a_max(c));
  // Without a feasible acceleration the velocity follows from the chosen
  // acceleration instead.
  if (feasible) v = std::clamp(v, -lim.v_max(c), lim.v_max(c));
  cmd.j_d(c) = j;
  cmd.a_d(c) = a;
  cmd.v_d(c) = v;
  cmd.q_d(c) = s.q(c) + t0 * v;
}

void CheckArgs(double t_r, double t0) {
  if (!(t0 > 0.0) || !(t_r >= t0 * (1.0 - 1e-9))) {
    throw std::invalid_argument("clamp needs t_r >= t0 > 0");
  }
}

}  // namespace

EffectiveLimits StoppingLimits(long long n0, double t0,
                               const JointLimits& limits) {
  if (n0 < 0) throw std::invalid_argument("n0 must be >= 0");
  EffectiveLimits out;
  out.j_max = limits.j_max;
  const double horizon = static_cast<double>(n0) * t0;
  for (int c = 0; c < kNumJoints; ++c) {
    const double a = limits.a_max(c);
    out.a_max(c) = std::min(a, horizon * limits.j_max(c));
    out.v_max(c) = std::min(
        limits.v_max(c),
        std::max(0.0, horizon * a - a * a / (2.0 * limits.j_max(c))));
  }
  out.stop_time =
      static_cast<double>(std::max(0LL, n0 - kStopMarginCycles)) * t0;
  return out;
}

double StopTime(double v, double a, double a_max, double j_max) {
  // Mirror so that the stop needs a phase of negative acceleration.
  if (v + a * std::abs(a) / (2.0 * j_max) < 0.0) {
    v = -v;
    a = -a;
  }
  // Ramp to -p, hold for `hold`, ramp back to zero.
  const double k = std::max(0.0, v + a * a / (2.0 * j_max));
  double p = std::sqrt(j_max * k);
  double hold = 0.0;
  if (p > a_max) {
    p = a_max;
    hold = (k - a_max * a_max / j_max) / a_max;
  }
  return (a + 2.0 * p) / j_max + hold;
}

CycleCommand ProjectKinematics(const ActuatorState& state,
                               const JointConfig& q_target, double t_r,
                               double t0, const EffectiveLimits& limits) {
  CheckArgs(t_r, t0);
  CycleCommand cmd;
  for (int c = 0; c < kNumJoints; ++c) {
    const Desired want =
        DesiredMotion(state.q(c), state.v(c), q_target(c), t_r, t0);
    Interval cur;
    const bool ok = HardInterval(state, c, t0, limits, cur);
    cur = StopInterval(cur, state, c, t0, limits);
    cmd.converged = cmd.converged && ok;
    Emit(cmd, c, state, std::clamp(want.a, cur.lo, cur.hi), t0, limits, ok);
  }
  cmd.iterations = 1;
  return cmd;
}

CycleCommand ClampKinematics(const ActuatorState& state,
                             const JointConfig& q_target, double t_r,
                             double t0, const EffectiveLimits& limits) {
  CheckArgs(t_r, t0);
  CycleCommand cmd;
  for (int c = 0; c < kNumJoints; ++c) {
    const double a_now = state.a(c);
    const double v_now = state.v(c);
    const double jmax = limits.j_max(c);
    const double amax = limits.a_max(c);
    const Interval vel =
        VelocityInterval(v_now, t0, limits.v_max(c), jmax);
    const Desired want = DesiredMotion(state.q(c), v_now, q_target(c), t_r, t0);
    Interval hard;
    const bool feasible = HardInterval(state, c, t0, limits, hard);
    double a = want.a;
    if (feasible) {
      // An active stop constraint lies inside the hard bounds, so it only
      // moves the target; the loop below still enforces each bound.
      const Interval stop = StopInterval(hard, state, c, t0, limits);
      if (stop.lo > hard.lo || stop.hi < hard.hi) {
        a = std::clamp(a, stop.lo, stop.hi);
      }
    }
    double j = (a - a_now) / t0;
    bool settled = false;
    int it = 0;
    while (!settled && it < kClampIterationCap) {
      ++it;
      settled = true;
      if (Exceeds(j, jmax)) {
        // Jerk held, acceleration and velocity follow forward.
        j = Sign(j) * jmax;
        a = a_now + j * t0;
        settled = false;
      }
      if (Exceeds(a, amax)) {
        // Acceleration held, jerk recomputed backward.
        a = Sign(a) * amax;
        j = (a - a_now) / t0;
        settled = false;
      }
      if (a > vel.hi + kLoopSlack * std::abs(vel.hi) + 1e-300) {
        a = vel.hi;
        j = (a - a_now) / t0;
        settled = false;
      } else if (a < vel.lo - kLoopSlack * std::abs(vel.lo) - 1e-300) {
        a = vel.lo;
        j = (a - a_now) / t0;
        settled = false;
      }
    }
    cmd.iterations = std::max(cmd.iterations, it);
    if (!settled) {
      // The three bounds admit no common acceleration; fall back to the
      // priority projection for this joint.
      a = std::clamp(want.a, hard.lo, hard.hi);
      cmd.converged = false;
    }
    Emit(cmd, c, state, a, t0, limits, settled);
  }
  return cmd;
}

ActuatorState Integrate(const ActuatorState& state, const CycleCommand& cmd,
                        double t0) {
  ActuatorState next;
  next.q = cmd.q_d;
  next.v = cmd.v_d;
  next.a = cmd.a_d;
  next.t = state.t + t0;
  return next;
}

Stream Follow(const Plan& plan, const JointLimits& limits, double t0_cycle) {
  if (plan.joints.empty()) throw std::invalid_argument("empty plan");
  if (!(t0_cycle > 0.0)) throw std::invalid_argument("t0_cycle must be > 0");
  long long ratio = 1;
  if (plan.n() > 0) {
    const double r = plan.t0 / t0_cycle;
    ratio = std::llround(r);
    if (ratio < 1 || std::abs(r - ratio) > 1e-9 * r) {
      throw std::invalid_argument(
          "plan interval is not an integer multiple of the cycle");
    }
  }
  Stream out;
  out.t0_cycle = t0_cycle;
  out.sample_record.assign(plan.joints.size(), -1);
  const EffectiveLimits full = StoppingLimits(
      std::numeric_limits<int>::max(), t0_cycle, limits);
  long long cycle = 0;
  int segment = 0;
  int first = 0;
  const int n = plan.n();
  while (first <= n) {
    int last = first;
    while (last < n && plan.cont[last + 1]) ++last;
    ActuatorState s;
    s.q = plan.joints[first];
    s.t = cycle * t0_cycle;
    out.segment_start.push_back(static_cast<long long>(out.records.size()));
    out.sample_record[first] = static_cast<long long>(out.records.size());
    out.records.push_back({cycle, segment, s, JointConfig::Zero(), true});
    const long long total = (last - first) * ratio;
    for (long long c = 1; c <= total; ++c) {
      const long long k = (c + ratio - 1) / ratio;  // samples into segment
      const double t_r = static_cast<double>(k * ratio - (c - 1)) * t0_cycle;
      const EffectiveLimits lim = StoppingLimits(total - c, t0_cycle, limits);
      const CycleCommand cmd =
          ClampKinematics(s, plan.joints[first + k], t_r, t0_cycle, lim);
      s = Integrate(s, cmd, t0_cycle);
      ++cycle;
      out.converged = out.converged && cmd.converged;
      out.records.push_back({cycle, segment, s, cmd.j_d, cmd.converged});
      if (c % ratio == 0) {
        out.sample_record[first + k] =
            static_cast<long long>(out.records.size()) - 1;
      }
    }
    // Bring any residual motion to rest with the full limits.
    long long extra = 0;
    while ((s.v.cwiseAbs().maxCoeff() > 1e-9 ||
            s.a.cwiseAbs().maxCoeff() > 1e-9) &&
           extra < kSettleCycleCap) {
      const CycleCommand cmd =
          ClampKinematics(s, s.q, t0_cycle, t0_cycle, full);
      s = Integrate(s, cmd, t0_cycle);
      ++cycle;
      ++extra;
      out.records.push_back({cycle, segment, s, cmd.j_d, cmd.converged});
    }
    if (extra == kSettleCycleCap) out.converged = false;
    out.settle_cycles += extra;
    ++cycle;  // re-posing between segments takes the arm off the stream
    ++segment;
    first = last + 1;
  }
  return out;
}

}  // namespace redres
