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


// Command-line front end. Exit codes: 0 success, 1 validation found
// violations, 2 infeasible path, 3 configuration error, 4 I/O error.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "redres/dp_planner.h"
#include "redres/feasibility_map.h"
#include "redres/format.h"
#include "redres/interpolator.h"
#include "redres/kinematics.h"
#include "redres/path_model.h"
#include "redres/robot_config.h"
#include "redres/sim_validator.h"
#include "redres/start_optimizer.h"

namespace {

using namespace redres;

enum ExitCode {
  kOk = 0,
  kViolations = 1,
  kInfeasible = 2,
  kConfigError = 3,
  kIoError = 4,
};

struct RunConfig {
  std::string robot;
  std::string path = "test1";
  std::string waypoints;
  double t_max = 10.0;
  double rate = 100.0;
  double cycle = 0.001;
  int m = 4000;
  std::optional<double> big_m;
  std::optional<int> pin_start;
  int workers = 1;
  std::string out = ".";
  std::string format = "pgm";
  std::string plan_file;
  bool feasibility = false;
  bool stream_csv = true;
};

void AddPathOptions(CLI::App* app, RunConfig& cfg) {
  app->add_option("--robot", cfg.robot,
                  "Robot model file (default: $REDRES_ROBOT_MODEL or "
                  "built-in)");
  app->add_option("--path", cfg.path, "Analytic path: test1 or test2")
      ->check(CLI::IsMember({"test1", "test2"}));
  app->add_option("--waypoints", cfg.waypoints,
                  "Waypoint CSV (t,x,y,z,qw,qx,qy,qz); overrides --path");
  app->add_option("--tmax", cfg.t_max, "Path duration in seconds");
  app->add_option("--rate", cfg.rate, "Plan samples per second");
  app->add_option("--out", cfg.out, "Output directory");
  app->add_option("--workers", cfg.workers, "Worker threads")
      ->check(CLI::PositiveNumber);
}

void AddGridOptions(CLI::App* app, RunConfig& cfg) {
  app->add_option("--m", cfg.m, "Number of q7 grid values");
  app->add_option("--M", cfg.big_m,
                  "Break penalty (default 1.01 * n * |q_max - q_min|^2)");
  app->add_option("--pin-start", cfg.pin_start,
                  "Force the first sample onto this grid column");
}

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

RobotModel LoadModel(const RunConfig& cfg) {
  std::string file = cfg.robot;
  if (file.empty()) {
    if (const char* env = std::getenv(kRobotModelEnv)) file = env;
  }
  if (file.empty()) return DefaultRobotModel();
  try {
    return LoadRobotModel(file);
  } catch (const std::ios_base::failure& e) {
    throw IoError(e.what());
  }
}

SampledPath BuildPath(const RunConfig& cfg) {
  if (!(cfg.rate > 0.0)) throw ConfigError("--rate must be positive");
  PathSpec spec;
  spec.t0 = 1.0 / cfg.rate;
  spec.t_max = cfg.t_max;
  if (!cfg.waypoints.empty()) {
    spec.id = std::filesystem::path(cfg.waypoints).stem().string();
    try {
      spec.waypoints = ReadWaypointsCsv(cfg.waypoints);
    } catch (const std::ios_base::failure& e) {
      throw IoError(e.what());
    }
  } else {
    spec.id = cfg.path;
    spec.analytic =
        cfg.path == "test2" ? AnalyticPath::kTest2 : AnalyticPath::kTest1;
  }
  return SamplePath(spec);
}

LossParams Loss(const RunConfig& cfg, const SampledPath& path,
                const RobotModel& model) {
  const double big_m = cfg.big_m.value_or(AutoPenalty(path.n(), model.limits));
  return MakeLossParams(big_m, path.t0, path.n(), model.limits);
}

std::filesystem::path OutFile(const RunConfig& cfg, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  if (ec) throw IoError("cannot create " + cfg.out + ": " + ec.message());
  return std::filesystem::path(cfg.out) / name;
}

template <class Writer>
void WriteFile(const RunConfig& cfg, const std::string& name, Writer write,
               bool binary = false) {
  const auto file = OutFile(cfg, name);
  std::ofstream out(file, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot write " + file.string());
  write(out);
  out.flush();
  if (!out) throw IoError("write failed for " + file.string());
}

ParamGrid Grid(const RunConfig& cfg, const SampledPath& path,
               const RobotModel& model) {
  if (cfg.m < 2) throw ConfigError("--m must be at least 2");
  return BuildParamGrid(path, cfg.m, model, cfg.workers);
}

void PrintBreaks(const Plan& plan) {
  if (plan.breakpoints == 0) return;
  std::cout << "discontinuity before samples:";
  for (int i = 1; i <= plan.n(); ++i) {
    if (!plan.cont[i]) std::cout << ' ' << i;
  }
  std::cout << '\n';
}

void WriteFeasibility(const RunConfig& cfg, const ParamGrid& grid,
                      const SampledPath& path) {
  const FeasibilityGrid fg = ComputeFeasibility(grid, path.t0, path.id);
  if (cfg.format == "csv") {
    WriteFile(cfg, "feasibility.csv",
              [&](std::ostream& o) { WriteFeasibilityCsv(fg, o); });
  } else {
    WriteFile(cfg, "feasibility.pgm",
              [&](std::ostream& o) { WriteFeasibilityPgm(fg, o); }, true);
  }
}

int CmdPlan(const RunConfig& cfg) {
  const RobotModel model = LoadModel(cfg);
  const SampledPath path = BuildPath(cfg);
  const LossParams lp = Loss(cfg, path, model);
  const ParamGrid grid = Grid(cfg, path, model);
  SolveOptions options;
  options.workers = cfg.workers;
  options.pinned_start = cfg.pin_start;
  const Plan plan = Solve(grid, model.limits, lp, options);
  WriteFile(cfg, "plan.csv", [&](std::ostream& o) { WritePlanCsv(plan, o); });
  if (cfg.feasibility) WriteFeasibility(cfg, grid, path);
  std::cout << "path=" << path.id << " n=" << path.n() << " m=" << grid.m()
            << " loss=" << FormatDouble(plan.loss)
            << " breakpoints=" << plan.breakpoints << '\n';
  PrintBreaks(plan);
  return kOk;
}

int CmdPlanCircular(const RunConfig& cfg) {
  const RobotModel model = LoadModel(cfg);
  const SampledPath path = BuildPath(cfg);
  if (!path.circular) throw ConfigError("path is not circular");
  const LossParams lp = Loss(cfg, path, model);
  const ParamGrid grid = Grid(cfg, path, model);
  SolveOptions options;
  options.workers = cfg.workers;
  const StartSearchResult r =
      OptimizeStart(path, grid, model.limits, lp, options);
  WriteFile(cfg, "baseline_plan.csv",
            [&](std::ostream& o) { WritePlanCsv(r.baseline, o); });
  WriteFile(cfg, "plan.csv", [&](std::ostream& o) {
    WritePlanCsv(r.plan, o, r.new_start_index);
  });
  std::cout << "baseline_breaks=" << r.baseline_breaks
            << ", improved=" << (r.improved ? "true" : "false")
            << ", new_start=" << r.new_start_index << '\n';
  std::cout << "plan breakpoints=" << r.plan.breakpoints
            << " loss=" << FormatDouble(r.plan.loss) << '\n';
  return kOk;
}

int CmdFeasibility(const RunConfig& cfg) {
  const RobotModel model = LoadModel(cfg);
  const SampledPath path = BuildPath(cfg);
  const ParamGrid grid = Grid(cfg, path, model);
  WriteFeasibility(cfg, grid, path);
  const FeasibilityGrid fg = ComputeFeasibility(grid, path.t0, path.id);
  const int w = VelocityBandHalfWidth(grid, model.limits, path.t0);
  std::cout << "rows=" << fg.rows << " cols=" << fg.cols << " band_w=" << w
            << " corridor=" << (HasBandCorridor(fg, w) ? "true" : "false")
            << '\n';
  return kOk;
}

Plan ObtainPlan(const RunConfig& cfg, const SampledPath& path,
                const RobotModel& model) {
  if (cfg.plan_file.empty()) {
    const LossParams lp = Loss(cfg, path, model);
    SolveOptions options;
    options.workers = cfg.workers;
    options.pinned_start = cfg.pin_start;
    return Solve(Grid(cfg, path, model), model.limits, lp, options);
  }
  std::ifstream in(cfg.plan_file);
  if (!in) throw IoError("cannot open " + cfg.plan_file);
  Plan plan = ReadPlanCsv(in);
  if (plan.n() != path.n()) {
    throw ConfigError("plan has " + std::to_string(plan.n() + 1) +
                      " samples, path has " + std::to_string(path.n() + 1));
  }
  if (plan.n() > 0 && std::abs(plan.t0 - path.t0) > 1e-12) {
    throw ConfigError("plan interval does not match --rate");
  }
  return plan;
}

int CmdSimulate(const RunConfig& cfg) {
  const RobotModel model = LoadModel(cfg);
  const SampledPath path = BuildPath(cfg);
  const Plan plan = ObtainPlan(cfg, path, model);
  const Trace trace = Replay(plan, model, cfg.cycle);
  const ConstraintReport report =
      ValidateConstraints(trace.stream, model.limits);
  const ErrorStats err = CartesianError(trace, path);
  if (cfg.stream_csv) {
    WriteFile(cfg, "stream.csv",
              [&](std::ostream& o) { WriteStreamCsv(trace.stream, o); });
  }
  WriteFile(cfg, "errors.csv", [&](std::ostream& o) { WriteErrorCsv(err, o); });
  WriteFile(cfg, "limits.txt",
            [&](std::ostream& o) { WriteConstraintReport(report, o); });
  std::cout << "cycles=" << report.cycles
            << " violations=" << report.violations.size()
            << " settle_cycles=" << trace.stream.settle_cycles
            << " mean_error=" << FormatDouble(err.mean)
            << " max_error=" << FormatDouble(err.max) << '\n';
  return report.violations.empty() ? kOk : kViolations;
}

int CmdValidate(const RunConfig& cfg) {
  const RobotModel model = LoadModel(cfg);
  const SampledPath path = BuildPath(cfg);
  if (cfg.plan_file.empty()) throw ConfigError("validate needs --plan");
  const Plan plan = ObtainPlan(cfg, path, model);
  const auto violations = CheckPlan(plan, model.limits);
  const ErrorStats err = PlanError(plan, path, model);
  for (const Violation& v : violations) {
    std::cout << "violation sample=" << v.record << " joint=" << v.joint + 1
              << " kind=" << v.kind << " value=" << FormatDouble(v.value)
              << " bound=" << FormatDouble(v.bound) << '\n';
  }
  const int breaks = static_cast<int>(
      std::count(plan.cont.begin() + 1, plan.cont.end(), false));
  std::cout << "violations=" << violations.size() << " breakpoints=" << breaks
            << " max_pose_error=" << FormatDouble(err.max) << '\n';
  return violations.empty() && err.max < 1e-6 ? kOk : kViolations;
}

// Fills options not given on the command line from a "key = value" file
// whose keys are the long option names, e.g. "rate = 100".
void ApplyConfigFile(CLI::App* sub, const std::string& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file);
  for (const auto& [key, value] : ParseKeyValues(in)) {
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config") {
      throw ConfigError("unknown key '" + key + "' in " + file);
    }
    if (opt->count() > 0) continue;
    opt->add_result(opt->get_expected_min() == 0
                        ? opt->get_flag_value(key, value)
                        : value);
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw ConfigError(key + ": " + e.what());
    }
  }
}

void PrintError(int code, const char* kind, const std::string& message) {
  std::cerr << "error code=" << code << " kind=" << kind
            << " message=" << message << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Breakpoint-minimizing redundancy resolution for a 7-DOF arm"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* plan = app.add_subcommand("plan", "Optimal plan over the q7 grid");
  AddPathOptions(plan, cfg);
  AddGridOptions(plan, cfg);
  plan->add_flag("--feasibility", cfg.feasibility,
                 "Also write the feasibility map");
  plan->add_option("--format", cfg.format, "Feasibility format: pgm or csv")
      ->check(CLI::IsMember({"pgm", "csv"}));

  auto* circular = app.add_subcommand(
      "plan-circular", "Plan a closed path and move its start to save a break");
  AddPathOptions(circular, cfg);
  AddGridOptions(circular, cfg);

  auto* feas = app.add_subcommand("feasibility", "Export the existence map");
  AddPathOptions(feas, cfg);
  feas->add_option("--m", cfg.m, "Number of q7 grid values");
  feas->add_option("--format", cfg.format, "pgm or csv")
      ->check(CLI::IsMember({"pgm", "csv"}));

  auto* sim = app.add_subcommand("simulate",
                                 "Follow a plan at the communication rate");
  AddPathOptions(sim, cfg);
  AddGridOptions(sim, cfg);
  sim->add_option("--plan", cfg.plan_file, "Plan CSV (default: plan anew)");
  sim->add_option("--cycle", cfg.cycle, "Communication cycle in seconds");
  sim->add_flag("!--no-stream", cfg.stream_csv, "Skip stream.csv");

  auto* val = app.add_subcommand("validate", "Re-check a plan CSV");
  AddPathOptions(val, cfg);
  val->add_option("--plan", cfg.plan_file, "Plan CSV")->required();

  std::string config_file;
  for (CLI::App* sub : {plan, circular, feas, sim, val}) {
    sub->add_option("--config", config_file,
                    "key = value file with option defaults");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    PrintError(kConfigError, "config", e.what());
    return kConfigError;
  }

  try {
    if (!config_file.empty()) {
      for (CLI::App* sub : app.get_subcommands()) {
        ApplyConfigFile(sub, config_file);
      }
    }
    if (plan->parsed()) return CmdPlan(cfg);
    if (circular->parsed()) return CmdPlanCircular(cfg);
    if (feas->parsed()) return CmdFeasibility(cfg);
    if (sim->parsed()) return CmdSimulate(cfg);
    if (val->parsed()) return CmdValidate(cfg);
  } catch (const InfeasiblePathError& e) {
    PrintError(kInfeasible, "infeasible", e.what());
    return kInfeasible;
  } catch (const IoError& e) {
    PrintError(kIoError, "io", e.what());
    return kIoError;
  } catch (const std::ios_base::failure& e) {
    PrintError(kIoError, "io", e.what());
    return kIoError;
  } catch (const std::exception& e) {
    PrintError(kConfigError, "config", e.what());
    return kConfigError;
  }
  return kConfigError;
}
