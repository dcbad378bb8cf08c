#include "rigsched/solver.hpp"

#include <cmath>
#include <limits>

namespace rigsched {

namespace {
constexpr double kStepUnderflow = 1e-12;

// Squared displacement in the inverse metric; zero-scale coordinates cannot
// move and contribute nothing.
double metric_distance_sq(const Schedule& a, const Schedule& b,
                          const VariableScaling& scaling) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.tau.size(); ++i) {
    const double d = a.tau[i] - b.tau[i];
    if (d != 0.0) sum += d * d / scaling.tau[i];
  }
  for (Eigen::Index j = 0; j < a.alpha.rows(); ++j) {
    for (Eigen::Index k = 0; k < a.alpha.cols(); ++k) {
      const double d = a.alpha(j, k) - b.alpha(j, k);
      if (d != 0.0) sum += d * d / scaling.alpha[j];
    }
  }
  return sum;
}
}  // namespace

void SolverConfig::validate() const {
  if (!(epsilon0 > 0.0) || !(vartheta0 > 0.0)) {
    throw std::invalid_argument("SolverConfig: continuation parameters > 0");
  }
  if (!(continuation_factor > 1.0)) {
    throw std::invalid_argument("SolverConfig: continuation_factor > 1");
  }
  if (continuation_rounds < 1) {
    throw std::invalid_argument("SolverConfig: continuation_rounds >= 1");
  }
  if (!(ls_alpha > 0.0) || !(ls_alpha < 0.5)) {
    throw std::invalid_argument("SolverConfig: ls_alpha in (0, 0.5)");
  }
  if (!(ls_beta > 0.0) || !(ls_beta < 1.0)) {
    throw std::invalid_argument("SolverConfig: ls_beta in (0, 1)");
  }
  if (!(step0 > 0.0)) {
    throw std::invalid_argument("SolverConfig: step0 > 0");
  }
  if (!(tol_rel > 0.0)) {
    throw std::invalid_argument("SolverConfig: tol_rel > 0");
  }
  if (max_iter < 1) {
    throw std::invalid_argument("SolverConfig: max_iter >= 1");
  }
  if (!(violation_tol >= 0.0)) {
    throw std::invalid_argument("SolverConfig: violation_tol >= 0");
  }
}

Boxes problem_boxes(const ScheduleProblem& problem) {
  Boxes boxes;
  const int m = problem.demand_count();
  boxes.tau_lo.resize(m);
  boxes.tau_hi.resize(m);
  for (int i = 0; i < m; ++i) {
    boxes.tau_lo[i] = problem.demands()[static_cast<std::size_t>(i)].tau_lo;
    boxes.tau_hi[i] = problem.demands()[static_cast<std::size_t>(i)].tau_hi;
  }
  boxes.alpha_lo = problem.u_lo();
  boxes.alpha_hi = problem.u_hi();
  return boxes;
}

double project_box(double x, double lo, double hi) {
  if (lo > hi) {
    throw std::invalid_argument("project_box: lo > hi");
  }
  return x < lo ? lo : (x > hi ? hi : x);
}

VariableScaling box_metric(const Boxes& boxes) {
  VariableScaling scaling;
  scaling.tau = (boxes.tau_hi - boxes.tau_lo).array().square();
  scaling.alpha = (boxes.alpha_hi - boxes.alpha_lo).array().square();
  return scaling;
}

VariableScaling unit_metric(Eigen::Index demands, Eigen::Index inputs) {
  return VariableScaling{Eigen::VectorXd::Ones(demands),
                         Eigen::VectorXd::Ones(inputs)};
}

Schedule scaled_gradient_step(const Schedule& schedule, const Gradients& grads,
                              double step, const Boxes& boxes,
                              const VariableScaling& scaling) {
  Schedule out;
  out.tau.resize(schedule.tau.size());
  for (Eigen::Index i = 0; i < schedule.tau.size(); ++i) {
    out.tau[i] =
        project_box(schedule.tau[i] - step * scaling.tau[i] * grads.tau[i],
                    boxes.tau_lo[i], boxes.tau_hi[i]);
  }
  out.alpha.resize(schedule.alpha.rows(), schedule.alpha.cols());
  for (Eigen::Index j = 0; j < schedule.alpha.rows(); ++j) {
    for (Eigen::Index k = 0; k < schedule.alpha.cols(); ++k) {
      out.alpha(j, k) = project_box(
          schedule.alpha(j, k) - step * scaling.alpha[j] * grads.alpha(j, k),
          boxes.alpha_lo[j], boxes.alpha_hi[j]);
    }
  }
  return out;
}

Schedule gradient_step(const Schedule& schedule, const Gradients& grads,
                       double step, const Boxes& boxes) {
  return scaled_gradient_step(
      schedule, grads, step, boxes,
      unit_metric(schedule.tau.size(), schedule.alpha.rows()));
}

LineSearchResult line_search(const ObjectiveFn& objective,
                             const Schedule& current, double current_cost,
                             const Gradients& grads, const Boxes& boxes,
                             const VariableScaling& scaling,
                             const SolverConfig& cfg) {
  if (!std::isfinite(current_cost)) {
    throw InfeasibleStartError();
  }
  LineSearchResult result;
  double step = cfg.step0;
  while (step >= kStepUnderflow) {
    Schedule trial = scaled_gradient_step(current, grads, step, boxes, scaling);
    const double move_sq = metric_distance_sq(trial, current, scaling);
    if (move_sq == 0.0) break;  // projection blocks every direction
    const double trial_cost = objective.cost(trial);
    ++result.evaluations;
    if (trial_cost <= current_cost - cfg.ls_alpha * move_sq / step) {
      result.schedule = std::move(trial);
      result.cost = trial_cost;
      result.step = step;
      return result;
    }
    step *= cfg.ls_beta;
  }
  result.schedule = current;
  result.cost = current_cost;
  result.step = 0.0;
  return result;
}

SolveReport solve_round(const ObjectiveFn& objective, const Schedule& init,
                        const Boxes& boxes, const SolverConfig& cfg,
                        const IterateObserver& observer) {
  cfg.validate();
  SolveReport report;
  Schedule current = init;
  double cost = objective.cost(current);
  if (!std::isfinite(cost)) {
    throw InfeasibleStartError();
  }
  report.cost_trace.push_back(cost);
  report.termination = Termination::iteration_limit;

  const VariableScaling scaling = box_metric(boxes);
  int consecutive_small = 0;
  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    const Gradients grads = objective.gradient(current);
    report.grad_norm_trace.push_back(std::sqrt(
        grads.tau.squaredNorm() + grads.alpha.squaredNorm()));
    const LineSearchResult ls =
        line_search(objective, current, cost, grads, boxes, scaling, cfg);
    if (ls.step == 0.0) {
      report.termination = Termination::stalled;
      break;
    }
    const double improvement = cost - ls.cost;
    current = ls.schedule;
    cost = ls.cost;
    report.cost_trace.push_back(cost);
    report.iterations = iter;
    if (observer) observer(iter, current, cost);

    const double denom = std::max(1.0, std::abs(report.cost_trace.end()[-2]));
    if (improvement / denom < cfg.tol_rel) {
      if (++consecutive_small >= 3) {
        report.termination = Termination::converged;
        break;
      }
    } else {
      consecutive_small = 0;
    }
  }
  report.schedule = std::move(current);
  report.per_demand_delay = report.schedule.tau;
  return report;
}

namespace {

SolveReport run_continuation(const ScheduleProblem& problem,
                             const BasisResponses& basis,
                             const ObjectiveEvaluator& evaluator,
                             const Schedule& init, const SolverConfig& cfg,
                             const IterateObserver& observer) {
  cfg.validate();
  const Boxes boxes = problem_boxes(problem);
  const bool barrier = cfg.mode == SolveMode::barrier;

  SolveReport total;
  Schedule current = init;
  for (int round = 0; round < cfg.continuation_rounds; ++round) {
    const double scale = std::pow(cfg.continuation_factor, round);
    const double parameter =
        barrier ? cfg.epsilon0 / scale : cfg.vartheta0 * scale;

    ObjectiveFn objective;
    if (barrier) {
      const BarrierConfig bc{parameter};
      objective.cost = [&evaluator, bc](const Schedule& s) {
        return evaluator.barrier_cost(s, bc);
      };
      objective.gradient = [&evaluator, bc](const Schedule& s) {
        return evaluator.barrier_gradient(s, bc);
      };
    } else {
      const PenaltyConfig pc{parameter};
      objective.cost = [&evaluator, pc](const Schedule& s) {
        return evaluator.penalty_cost(s, pc);
      };
      objective.gradient = [&evaluator, pc](const Schedule& s) {
        return evaluator.penalty_gradient(s, pc);
      };
    }

    SolveReport round_report =
        solve_round(objective, current, boxes, cfg, observer);
    current = round_report.schedule;

    const ViolationReport viol =
        max_violation(basis, current, evaluator.grid());
    total.continuation_history.push_back(
        ContinuationRecord{parameter, round_report.cost_trace.back(),
                           viol.overall_max, round_report.iterations});
    total.cost_trace.insert(total.cost_trace.end(),
                            round_report.cost_trace.begin(),
                            round_report.cost_trace.end());
    total.grad_norm_trace.insert(total.grad_norm_trace.end(),
                                 round_report.grad_norm_trace.begin(),
                                 round_report.grad_norm_trace.end());
    total.iterations += round_report.iterations;
    total.termination = round_report.termination;

    if (!barrier && viol.overall_max <= cfg.violation_tol) {
      break;  // acceptable performance reached, stop escalating vartheta
    }
  }
  total.schedule = current;
  total.per_demand_delay = current.tau;
  total.violations = max_violation(basis, current, evaluator.grid());
  return total;
}

}  // namespace

SolveReport solve_barrier_continuation(const ScheduleProblem& problem,
                                       const BasisResponses& basis,
                                       const ObjectiveEvaluator& evaluator,
                                       const Schedule& init,
                                       const SolverConfig& cfg,
                                       const IterateObserver& observer) {
  SolverConfig barrier_cfg = cfg;
  barrier_cfg.mode = SolveMode::barrier;
  return run_continuation(problem, basis, evaluator, init, barrier_cfg,
                          observer);
}

SolveReport solve_penalty_continuation(const ScheduleProblem& problem,
                                       const BasisResponses& basis,
                                       const ObjectiveEvaluator& evaluator,
                                       const Schedule& init,
                                       const SolverConfig& cfg,
                                       const IterateObserver& observer) {
  SolverConfig penalty_cfg = cfg;
  penalty_cfg.mode = SolveMode::penalty;
  return run_continuation(problem, basis, evaluator, init, penalty_cfg,
                          observer);
}

Schedule feasible_init(const ScheduleProblem& problem,
                       const BasisResponses& basis,
                       const QuadratureGrid& grid) {
  const auto& demands = problem.demands();
  Schedule candidate = problem.zero_schedule();

  // The all-lower-bound schedule costs least; keep it when already feasible.
  if (max_violation(basis, candidate, grid).feasible) {
    return candidate;
  }

  double shortest = std::numeric_limits<double>::infinity();
  for (const auto& dem : demands) {
    shortest = std::min(dem.profile.support_end() - dem.profile.support_begin(),
                        shortest);
  }

  for (double gap = 0.0;; gap += shortest) {
    // The gap also pushes the first support back from t = 0, so a start made
    // infeasible by the initial transient alone still separates out.
    double cursor = gap;
    Schedule sched = problem.zero_schedule();
    for (std::size_t i = 0; i < demands.size(); ++i) {
      const auto& dem = demands[i];
      const double begin = dem.profile.support_begin();
      const double duration = dem.profile.support_end() - begin;
      const double tau = std::max(dem.tau_lo, cursor - begin);
      if (tau > dem.tau_hi) {
        throw SeparationError();
      }
      sched.tau[static_cast<Eigen::Index>(i)] = tau;
      cursor = begin + tau + duration + gap;
    }
    if (max_violation(basis, sched, grid).feasible) {
      return sched;
    }
    if (gap > problem.horizon()) {
      throw SeparationError();
    }
  }
}

}  // namespace rigsched
