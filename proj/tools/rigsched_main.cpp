#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rigsched/gradcheck.hpp"
#include "rigsched/io.hpp"
#include "rigsched/objectives.hpp"
#include "rigsched/scenario.hpp"
#include "rigsched/solver.hpp"

namespace {

namespace fs = std::filesystem;
using namespace rigsched;

// Exit codes: 0 success, 1 usage/parse error, 2 infeasible start (barrier),
// 3 residual violations (penalty), 4 internal numeric failure.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasibleStart = 2;
constexpr int kExitResidualViolations = 3;
constexpr int kExitNumericFailure = 4;

struct CommonFlags {
  std::string scenario_path;
  std::string out_dir = "out";
  std::optional<double> quadrature_step;
};

struct SolveFlags {
  std::optional<std::string> mode;
  std::optional<double> epsilon;
  std::optional<double> vartheta;
  std::optional<int> rounds;
  std::optional<std::string> init;
  std::optional<double> violation_tol;
};

void apply_overrides(Scenario& scenario, const CommonFlags& common,
                     const SolveFlags& flags) {
  if (common.quadrature_step) {
    scenario.quadrature_step = *common.quadrature_step;
  }
  if (flags.mode) {
    if (*flags.mode == "barrier") {
      scenario.solver.mode = SolveMode::barrier;
    } else if (*flags.mode == "penalty") {
      scenario.solver.mode = SolveMode::penalty;
    } else {
      throw ScenarioError("--mode must be 'barrier' or 'penalty'");
    }
  }
  if (flags.epsilon) scenario.solver.epsilon0 = *flags.epsilon;
  if (flags.vartheta) scenario.solver.vartheta0 = *flags.vartheta;
  if (flags.rounds) scenario.solver.continuation_rounds = *flags.rounds;
  if (flags.violation_tol) scenario.solver.violation_tol = *flags.violation_tol;
  if (flags.init) {
    const std::string& init = *flags.init;
    if (init == "zeros") {
      scenario.init.kind = InitSpec::Kind::zeros;
    } else if (init == "separated") {
      scenario.init.kind = InitSpec::Kind::separated;
    } else if (init.rfind("explicit:", 0) == 0) {
      scenario.init.kind = InitSpec::Kind::explicit_values;
      scenario.init.values = read_schedule_json(init.substr(9));
    } else {
      throw ScenarioError(
          "--init must be zeros, separated or explicit:<path>");
    }
  }
  scenario.solver.validate();
}

Schedule make_initial_schedule(const Scenario& scenario,
                               const BasisResponses& basis,
                               const QuadratureGrid& grid) {
  switch (scenario.init.kind) {
    case InitSpec::Kind::zeros:
      return scenario.problem.zero_schedule();
    case InitSpec::Kind::separated:
      return feasible_init(scenario.problem, basis, grid);
    case InitSpec::Kind::explicit_values: {
      const Schedule& s = scenario.init.values;
      if (s.tau.size() != scenario.problem.demand_count() ||
          s.alpha.rows() != scenario.problem.model().nu() ||
          s.alpha.cols() != scenario.problem.zoh_intervals()) {
        throw ScenarioError("explicit init has wrong dimensions");
      }
      if (!scenario.problem.in_boxes(s)) {
        throw ScenarioError("explicit init violates the decision boxes");
      }
      return s;
    }
  }
  throw std::logic_error("unreachable init kind");
}

int cmd_solve(const CommonFlags& common, const SolveFlags& flags) {
  Scenario scenario = load_scenario(common.scenario_path);
  apply_overrides(scenario, common, flags);

  const BasisResponses basis = scenario.problem.build_basis();
  const QuadratureGrid grid(scenario.problem.horizon(),
                            scenario.quadrature_step);
  const ObjectiveEvaluator evaluator(basis, scenario.problem, grid);
  const bool barrier = scenario.solver.mode == SolveMode::barrier;

  Schedule init;
  try {
    init = make_initial_schedule(scenario, basis, grid);
  } catch (const SeparationError& e) {
    std::cerr << "error: " << e.what()
              << " (consider --mode penalty, which accepts infeasible starts)"
              << "\n";
    return kExitInfeasibleStart;
  }

  const ViolationReport init_viol = max_violation(basis, init, grid);
  std::cout << "initial schedule: max violation "
            << format_double(init_viol.overall_max)
            << (init_viol.feasible ? " (feasible)" : " (infeasible)") << "\n";

  SolveReport report;
  try {
    report = barrier
                 ? solve_barrier_continuation(scenario.problem, basis,
                                              evaluator, init, scenario.solver)
                 : solve_penalty_continuation(scenario.problem, basis,
                                              evaluator, init, scenario.solver);
  } catch (const InfeasibleStartError& e) {
    std::cerr << "error: " << e.what()
              << " (use --mode penalty or --init separated)\n";
    return kExitInfeasibleStart;
  }

  fs::create_directories(common.out_dir);
  const fs::path out(common.out_dir);
  write_report_json(out / "report.json", report,
                    barrier ? "barrier" : "penalty");
  write_schedule_json(out / "schedule.json", report.schedule);
  write_violation_json(out / "violations.json", report.violations);
  write_trajectory_csv(out / "trajectory.csv", scenario, basis,
                       report.schedule, grid);

  std::cout << "rounds: " << report.continuation_history.size()
            << ", iterations: " << report.iterations << "\n";
  std::cout << "final cost: " << format_double(report.cost_trace.back())
            << ", total delay: "
            << format_double(report.per_demand_delay.sum()) << "\n";
  std::cout << "final max violation: "
            << format_double(report.violations.overall_max) << "\n";
  std::cout << "artifacts written to " << out.string() << "\n";

  if (report.violations.overall_max > scenario.solver.violation_tol) {
    std::cerr << "residual constraint violations exceed tolerance "
              << format_double(scenario.solver.violation_tol) << "\n";
    return kExitResidualViolations;
  }
  return kExitOk;
}

int cmd_simulate(const CommonFlags& common, const std::string& schedule_path) {
  Scenario scenario = load_scenario(common.scenario_path);
  if (common.quadrature_step) {
    scenario.quadrature_step = *common.quadrature_step;
  }
  const Schedule schedule = read_schedule_json(schedule_path);
  if (schedule.tau.size() != scenario.problem.demand_count() ||
      schedule.alpha.rows() != scenario.problem.model().nu() ||
      schedule.alpha.cols() != scenario.problem.zoh_intervals()) {
    throw ScenarioError("schedule dimensions do not match the scenario");
  }

  const BasisResponses basis = scenario.problem.build_basis();
  const QuadratureGrid grid(scenario.problem.horizon(),
                            scenario.quadrature_step);
  const ViolationReport viol = max_violation(basis, schedule, grid);

  fs::create_directories(common.out_dir);
  const fs::path out(common.out_dir);
  write_trajectory_csv(out / "trajectory.csv", scenario, basis, schedule,
                       grid);
  write_violation_json(out / "violations.json", viol);

  std::cout << "max violation: " << format_double(viol.overall_max)
            << (viol.feasible ? " (feasible)" : " (infeasible)") << "\n";
  std::cout << "artifacts written to " << out.string() << "\n";
  return kExitOk;
}

int cmd_init(const CommonFlags& common, const std::string& kind) {
  Scenario scenario = load_scenario(common.scenario_path);
  if (common.quadrature_step) {
    scenario.quadrature_step = *common.quadrature_step;
  }
  const BasisResponses basis = scenario.problem.build_basis();
  const QuadratureGrid grid(scenario.problem.horizon(),
                            scenario.quadrature_step);

  Schedule schedule;
  if (kind == "zeros") {
    schedule = scenario.problem.zero_schedule();
  } else if (kind == "separated") {
    try {
      schedule = feasible_init(scenario.problem, basis, grid);
    } catch (const SeparationError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitInfeasibleStart;
    }
  } else {
    std::cerr << "error: --kind must be zeros or separated\n";
    return kExitUsage;
  }

  const ViolationReport viol = max_violation(basis, schedule, grid);
  fs::create_directories(common.out_dir);
  const fs::path out(common.out_dir);
  write_schedule_json(out / "schedule.json", schedule);
  write_violation_json(out / "violations.json", viol);
  std::cout << "total delay: " << format_double(schedule.tau.sum())
            << ", max violation: " << format_double(viol.overall_max)
            << (viol.feasible ? " (feasible)" : " (infeasible)") << "\n";
  std::cout << "artifacts written to " << out.string() << "\n";
  return kExitOk;
}

int cmd_check_gradients(const CommonFlags& common, const SolveFlags& flags,
                        int num_schedules, std::uint64_t seed, double fd_step,
                        double tolerance, bool feasible_draws) {
  Scenario scenario = load_scenario(common.scenario_path);
  apply_overrides(scenario, common, flags);

  const BasisResponses basis = scenario.problem.build_basis();
  const QuadratureGrid grid(scenario.problem.horizon(),
                            scenario.quadrature_step);
  const ObjectiveEvaluator evaluator(basis, scenario.problem, grid);

  GradCheckOptions options;
  options.mode = scenario.solver.mode;
  options.epsilon = scenario.solver.epsilon0;
  options.vartheta = scenario.solver.vartheta0;
  options.num_schedules = num_schedules;
  options.seed = seed;
  options.fd_rel_step = fd_step;
  options.feasible_draws = feasible_draws;

  const GradCheckResult result =
      run_gradient_check(scenario.problem, basis, evaluator, options);
  std::cout << "mode: "
            << (options.mode == SolveMode::barrier ? "barrier" : "penalty")
            << ", schedules: " << result.checked_schedules
            << ", coordinates: " << result.coordinates << "\n";
  std::cout << "worst relative error: "
            << format_double(result.worst_rel_error) << "\n";
  if (result.worst_rel_error > tolerance) {
    std::cerr << "gradient check failed tolerance "
              << format_double(tolerance) << "\n";
    return kExitResidualViolations;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "rigsched: schedules rigid demand profiles on constrained LTI systems "
      "by projected-gradient descent (log-barrier or soft-penalty)"};
  app.require_subcommand(1);

  CommonFlags common;
  SolveFlags flags;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("scenario", common.scenario_path, "scenario file (JSON)")
        ->required();
    cmd->add_option("--out", common.out_dir, "output directory");
    cmd->add_option("--dt", common.quadrature_step,
                    "quadrature step override (min)");
  };
  auto add_solver_flags = [&](CLI::App* cmd) {
    cmd->add_option("--mode", flags.mode, "barrier or penalty");
    cmd->add_option("--epsilon", flags.epsilon, "initial barrier weight");
    cmd->add_option("--vartheta", flags.vartheta,
                    "initial penalty sharpness");
    cmd->add_option("--rounds", flags.rounds, "continuation rounds");
    cmd->add_option("--init", flags.init,
                    "zeros | separated | explicit:<schedule.json>");
    cmd->add_option("--tol", flags.violation_tol,
                    "acceptable max violation");
  };

  CLI::App* solve = app.add_subcommand("solve", "run the configured pipeline");
  add_common(solve);
  add_solver_flags(solve);

  CLI::App* simulate =
      app.add_subcommand("simulate", "re-simulate a fixed schedule");
  std::string schedule_path;
  add_common(simulate);
  simulate->add_option("schedule", schedule_path, "schedule file (JSON)")
      ->required();

  CLI::App* init = app.add_subcommand("init", "emit an initial schedule");
  std::string init_kind = "separated";
  add_common(init);
  init->add_option("--kind", init_kind, "zeros or separated");

  CLI::App* check =
      app.add_subcommand("check-gradients",
                         "analytic vs finite-difference gradient comparison");
  int num_schedules = 20;
  std::uint64_t seed = 20240601;
  double fd_step = 0.0;  // 0 = automatic
  bool feasible_draws = false;
  double gc_tol = 1e-2;
  add_common(check);
  add_solver_flags(check);
  check->add_option("--n", num_schedules, "number of random schedules");
  check->add_option("--seed", seed, "RNG seed");
  check->add_option("--fd-step", fd_step,
                    "relative finite-difference step (0 = automatic)");
  check->add_option("--check-tol", gc_tol, "pass/fail tolerance");
  check->add_flag("--feasible-draws", feasible_draws,
                  "draw feasible schedules in penalty mode too");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(common, flags);
    if (simulate->parsed()) return cmd_simulate(common, schedule_path);
    if (init->parsed()) return cmd_init(common, init_kind);
    if (check->parsed()) {
      return cmd_check_gradients(common, flags, num_schedules, seed, fd_step,
                                 gc_tol, feasible_draws);
    }
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitNumericFailure;
  }
  return kExitUsage;
}
