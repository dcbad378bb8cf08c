#include <doctest.h>

#include <cmath>
#include <limits>

#include "rigsched/solver.hpp"
#include "support/test_models.hpp"

using namespace rigsched;

namespace {

Boxes scalar_boxes(double lo, double hi) {
  Boxes b;
  b.tau_lo = Eigen::VectorXd::Constant(1, lo);
  b.tau_hi = Eigen::VectorXd::Constant(1, hi);
  b.alpha_lo = Eigen::VectorXd::Zero(0);
  b.alpha_hi = Eigen::VectorXd::Zero(0);
  return b;
}

Schedule scalar_schedule(double x) {
  Schedule s;
  s.tau = Eigen::VectorXd::Constant(1, x);
  s.alpha = Eigen::MatrixXd::Zero(0, 0);
  return s;
}

Gradients scalar_gradients(double g) {
  Gradients grads;
  grads.tau = Eigen::VectorXd::Constant(1, g);
  grads.alpha = Eigen::MatrixXd::Zero(0, 0);
  return grads;
}

// 1-D objective wrapper over the schedule's single delay.
ObjectiveFn scalar_objective(std::function<double(double)> f,
                             std::function<double(double)> df) {
  ObjectiveFn obj;
  obj.cost = [f](const Schedule& s) { return f(s.tau[0]); };
  obj.gradient = [df](const Schedule& s) { return scalar_gradients(df(s.tau[0])); };
  return obj;
}

}  // namespace

TEST_CASE("project_box clamps into the interval") {
  CHECK(project_box(-5.0, 0.0, 300.0) == 0.0);
  CHECK(project_box(150.0, 0.0, 300.0) == 150.0);
  CHECK(project_box(0.2, -0.05, 0.05) == 0.05);
  CHECK_THROWS_AS(project_box(1.0, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("gradient_step moves and projects componentwise") {
  const Boxes boxes = scalar_boxes(0.0, 300.0);
  // Zero gradient: fixed point.
  CHECK(gradient_step(scalar_schedule(42.0), scalar_gradients(0.0), 10.0,
                      boxes)
            .tau[0] == 42.0);
  // Interior move.
  CHECK(gradient_step(scalar_schedule(0.0), scalar_gradients(-1.0), 10.0,
                      boxes)
            .tau[0] == 10.0);
  // Clamped at the lower bound.
  CHECK(gradient_step(scalar_schedule(1.0), scalar_gradients(1.0), 10.0,
                      boxes)
            .tau[0] == 0.0);
}

TEST_CASE("line search descends on a quadratic") {
  const ObjectiveFn obj = scalar_objective(
      [](double x) { return x * x; }, [](double x) { return 2.0 * x; });
  SolverConfig cfg;
  const auto res = line_search(obj, scalar_schedule(1.0), 1.0,
                               scalar_gradients(2.0), scalar_boxes(-10, 10),
                               unit_metric(1, 0), cfg);
  CHECK(res.step > 0.0);
  CHECK(res.cost < 1.0);
}

TEST_CASE("line search shrinks past infinite trial costs") {
  // Infinite to the left of 0.3: backtracking must stop at feasible trials.
  const ObjectiveFn obj = scalar_objective(
      [](double x) {
        return x < 0.3 ? std::numeric_limits<double>::infinity()
                       : (x - 0.2) * (x - 0.2);
      },
      [](double x) { return 2.0 * (x - 0.2); });
  SolverConfig cfg;
  const double f0 = 0.04;
  const auto res = line_search(obj, scalar_schedule(0.4), f0,
                               scalar_gradients(0.4), scalar_boxes(-10, 10),
                               unit_metric(1, 0), cfg);
  CHECK(res.step > 0.0);
  CHECK(res.step < cfg.step0);
  CHECK(std::isfinite(res.cost));
  CHECK(res.cost < f0);
  CHECK(res.schedule.tau[0] >= 0.3);
}

TEST_CASE("line search reports a stall on a zero gradient") {
  const ObjectiveFn obj = scalar_objective([](double x) { return x * x; },
                                           [](double) { return 0.0; });
  SolverConfig cfg;
  const auto res = line_search(obj, scalar_schedule(1.0), 1.0,
                               scalar_gradients(0.0), scalar_boxes(-10, 10),
                               unit_metric(1, 0), cfg);
  CHECK(res.step == 0.0);
  CHECK(res.schedule.tau[0] == 1.0);
}

TEST_CASE("line search rejects an infinite incumbent") {
  const ObjectiveFn obj = scalar_objective(
      [](double) { return std::numeric_limits<double>::infinity(); },
      [](double) { return 1.0; });
  SolverConfig cfg;
  CHECK_THROWS_AS(line_search(obj, scalar_schedule(0.0),
                              std::numeric_limits<double>::infinity(),
                              scalar_gradients(1.0), scalar_boxes(-10, 10),
                              unit_metric(1, 0), cfg),
                  InfeasibleStartError);
}

TEST_CASE("solve_round terminates promptly at a minimizer") {
  const ObjectiveFn obj = scalar_objective(
      [](double x) { return (x - 5.0) * (x - 5.0); },
      [](double x) { return 2.0 * (x - 5.0); });
  SolverConfig cfg;
  const SolveReport report =
      solve_round(obj, scalar_schedule(5.0), scalar_boxes(0, 10), cfg);
  CHECK(report.iterations <= 3);
  CHECK(report.schedule.tau[0] == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("solve_round keeps a non-increasing cost trace") {
  const ObjectiveFn obj = scalar_objective(
      [](double x) { return std::pow(x - 2.0, 4.0) + 0.5 * x; },
      [](double x) { return 4.0 * std::pow(x - 2.0, 3.0) + 0.5; });
  SolverConfig cfg;
  const SolveReport report =
      solve_round(obj, scalar_schedule(9.0), scalar_boxes(0, 10), cfg);
  for (std::size_t i = 1; i < report.cost_trace.size(); ++i) {
    CHECK(report.cost_trace[i] <= report.cost_trace[i - 1]);
  }
  CHECK(report.cost_trace.front() > report.cost_trace.back());
}

TEST_CASE("barrier continuation finds the smallest feasible delay") {
  const ScheduleProblem problem = testsup::capacity_toy();
  const BasisResponses basis = problem.build_basis();
  const QuadratureGrid grid(problem.horizon(), 0.02);
  const ObjectiveEvaluator evaluator(basis, problem, grid);

  // Brute-force oracle: smallest grid-feasible delay.
  const Eigen::MatrixXd x0_grid = basis.x0_on(grid.nodes());
  double tau_star = std::numeric_limits<double>::quiet_NaN();
  Schedule probe = problem.zero_schedule();
  for (double tau = 0.0; tau <= 20.0; tau += 2e-3) {
    probe.tau[0] = tau;
    if (max_violation(basis, probe, grid).feasible) {
      tau_star = tau;
      break;
    }
  }
  REQUIRE(std::isfinite(tau_star));
  CHECK(tau_star > 0.5);  // the toy is infeasible without a delay

  SolverConfig cfg;
  cfg.mode = SolveMode::barrier;
  cfg.epsilon0 = 0.1;
  cfg.continuation_rounds = 5;
  const Schedule init = feasible_init(problem, basis, grid);
  bool boxes_ok = true;
  const SolveReport report = solve_barrier_continuation(
      problem, basis, evaluator, init, cfg,
      [&](int, const Schedule& s, double) {
        boxes_ok = boxes_ok && problem.in_boxes(s, 1e-12);
      });
  CHECK(boxes_ok);
  CHECK(std::abs(report.schedule.tau[0] - tau_star) <= 1e-2);
  CHECK(report.violations.feasible);
  // True delay cost shrinks (non-strictly) along the continuation.
  for (std::size_t r = 1; r < report.continuation_history.size(); ++r) {
    CHECK(report.continuation_history[r].final_cost <=
          report.continuation_history[r - 1].final_cost + 1e-9);
  }
}

TEST_CASE("penalty continuation matches the toy oracle at sharp vartheta") {
  const ScheduleProblem problem = testsup::capacity_toy();
  const BasisResponses basis = problem.build_basis();
  const QuadratureGrid grid(problem.horizon(), 0.02);
  const ObjectiveEvaluator evaluator(basis, problem, grid);

  SolverConfig cfg;
  cfg.mode = SolveMode::penalty;
  cfg.vartheta0 = 100.0;
  cfg.continuation_rounds = 3;
  cfg.violation_tol = 1e-3;
  const SolveReport report = solve_penalty_continuation(
      problem, basis, evaluator, problem.zero_schedule(), cfg);
  CHECK(report.violations.overall_max <= cfg.violation_tol);
  CHECK(report.schedule.tau[0] > 0.5);
}

TEST_CASE("penalty mode stays put when already optimal and interior") {
  // Zero-amplitude demand: no violation anywhere, the linear delay penalty
  // pins tau at its lower bound immediately.
  Eigen::MatrixXd a(1, 1), b(1, 1), c(1, 1);
  a << -1.0;
  b << 0.0;
  c << 1.0;
  Eigen::VectorXd d(1), x0(1), u0(1), ulo(1), uhi(1);
  d << 5.0;
  x0 << 0.0;
  u0 << 0.0;
  ulo << 0.0;
  uhi << 0.0;
  std::vector<Eigen::MatrixXd> e = {Eigen::MatrixXd::Ones(1, 1)};
  StateSpaceModel model(a, b, e, c, d, x0, u0);
  std::vector<DemandRequest> demands = {
      DemandRequest{PiecewiseSignal::pulse(0, 1, 0.0), 2.0, 10.0,
                    PenaltySpec{}, 0}};
  ScheduleProblem problem(model, demands, 12.0, 12.0, ulo, uhi);
  const BasisResponses basis = problem.build_basis();
  const QuadratureGrid grid(12.0, 0.1);
  const ObjectiveEvaluator evaluator(basis, problem, grid);

  SolverConfig cfg;
  cfg.mode = SolveMode::penalty;
  cfg.vartheta0 = 100.0;
  const SolveReport report = solve_penalty_continuation(
      problem, basis, evaluator, problem.zero_schedule(), cfg);
  CHECK(report.schedule.tau[0] == 2.0);  // the box minimum
  CHECK(report.continuation_history.size() == 1);
  CHECK(report.violations.overall_max < 0.0);
  CHECK(report.iterations <= 1);
}

TEST_CASE("feasible_init keeps lower bounds when nothing conflicts") {
  Eigen::MatrixXd a(1, 1), b(1, 1), c(1, 1);
  a << -1.0;
  b << 0.0;
  c << 1.0;
  Eigen::VectorXd d(1), x0(1), u0(1), ulo(1), uhi(1);
  d << 5.0;
  x0 << 0.0;
  u0 << 0.0;
  ulo << 0.0;
  uhi << 0.0;
  std::vector<Eigen::MatrixXd> e = {Eigen::MatrixXd::Ones(1, 1)};
  StateSpaceModel model(a, b, e, c, d, x0, u0);
  std::vector<DemandRequest> demands;
  for (int i = 0; i < 2; ++i) {
    demands.push_back(DemandRequest{PiecewiseSignal::pulse(0, 1, 0.0),
                                    1.5 * i, 30.0, PenaltySpec{}, 0});
  }
  ScheduleProblem problem(model, demands, 40.0, 40.0, ulo, uhi);
  const BasisResponses basis = problem.build_basis();
  const QuadratureGrid grid(40.0, 0.25);
  const Schedule init = feasible_init(problem, basis, grid);
  CHECK(init.tau[0] == 0.0);
  CHECK(init.tau[1] == 1.5);
  CHECK(init.alpha.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("feasible_init separates colliding pulses") {
  // Two simultaneous pulses overflow a capacity-1 leaky reservoir; one alone
  // fits, so the initializer pushes the second past the first.
  Eigen::MatrixXd a(1, 1), b(1, 1), c(1, 1);
  a << -0.5;
  b << 0.0;
  c << 1.0;
  Eigen::VectorXd d(1), x0(1), u0(1), ulo(1), uhi(1);
  d << 1.0;
  x0 << 0.0;
  u0 << 0.0;
  ulo << 0.0;
  uhi << 0.0;
  std::vector<Eigen::MatrixXd> e = {Eigen::MatrixXd::Ones(1, 1)};
  StateSpaceModel model(a, b, e, c, d, x0, u0);
  std::vector<DemandRequest> demands(
      2, DemandRequest{PiecewiseSignal::pulse(0, 2, 0.4), 0.0, 30.0,
                       PenaltySpec{}, 0});
  ScheduleProblem problem(model, demands, 40.0, 40.0, ulo, uhi);
  const BasisResponses basis = problem.build_basis();
  const QuadratureGrid grid(40.0, 0.05);

  Schedule both_zero = problem.zero_schedule();
  CHECK_FALSE(max_violation(basis, both_zero, grid).feasible);

  const Schedule init = feasible_init(problem, basis, grid);
  CHECK(init.tau[0] == 0.0);
  CHECK(init.tau[1] >= 2.0);  // second support starts after the first ends
  CHECK(max_violation(basis, init, grid).feasible);
}

TEST_CASE("feasible_init gives up when the boxes are too tight") {
  Eigen::MatrixXd a(1, 1), b(1, 1), c(1, 1);
  a << -0.5;
  b << 0.0;
  c << 1.0;
  Eigen::VectorXd d(1), x0(1), u0(1), ulo(1), uhi(1);
  d << 1.0;
  x0 << 0.0;
  u0 << 0.0;
  ulo << 0.0;
  uhi << 0.0;
  std::vector<Eigen::MatrixXd> e = {Eigen::MatrixXd::Ones(1, 1)};
  StateSpaceModel model(a, b, e, c, d, x0, u0);
  std::vector<DemandRequest> demands(
      2, DemandRequest{PiecewiseSignal::pulse(0, 2, 0.4), 0.0, 1.0,
                       PenaltySpec{}, 0});
  ScheduleProblem problem(model, demands, 40.0, 40.0, ulo, uhi);
  const BasisResponses basis = problem.build_basis();
  const QuadratureGrid grid(40.0, 0.05);
  CHECK_THROWS_AS(feasible_init(problem, basis, grid), SeparationError);
}
