#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <vector>

#include "rigsched/objectives.hpp"
#include "rigsched/problem.hpp"

namespace rigsched {

enum class SolveMode { barrier, penalty };

struct SolverConfig {
  SolveMode mode = SolveMode::barrier;
  double epsilon0 = 0.1;        // initial barrier weight
  double vartheta0 = 100.0;     // initial penalty sharpness
  double continuation_factor = 10.0;
  int continuation_rounds = 3;
  double ls_alpha = 0.3;  // sufficient-decrease fraction, (0, 0.5)
  double ls_beta = 0.5;   // backtrack factor, (0, 1)
  double step0 = 1.0;     // initial trial step
  double tol_rel = 1e-6;  // relative-improvement termination
  int max_iter = 2000;
  double violation_tol = 1e-3;  // penalty continuation stop

  void validate() const;
};

/// Per-variable boxes of the decision variables.
struct Boxes {
  Eigen::VectorXd tau_lo, tau_hi;      // m
  Eigen::VectorXd alpha_lo, alpha_hi;  // nu (shared over all ZOH intervals)
};
Boxes problem_boxes(const ScheduleProblem& problem);

/// Objective closure the projected-gradient loop iterates on.
struct ObjectiveFn {
  std::function<double(const Schedule&)> cost;
  std::function<Gradients(const Schedule&)> gradient;
};

class InfeasibleStartError : public std::runtime_error {
 public:
  InfeasibleStartError()
      : std::runtime_error(
            "infeasible start: barrier objective is infinite at the initial "
            "schedule") {}
};

class SeparationError : public std::runtime_error {
 public:
  SeparationError()
      : std::runtime_error(
            "no feasible separation found within delay boxes") {}
};

/// Clamp into [lo, hi]; throws std::invalid_argument if lo > hi.
double project_box(double x, double lo, double hi);

/// One projected step: every variable moves by -step * gradient and is
/// clamped into its box.
Schedule gradient_step(const Schedule& schedule, const Gradients& grads,
                       double step, const Boxes& boxes);

/// Per-variable step scales (the paper's per-variable step sizes, realized
/// as a fixed diagonal metric under one backtracked multiplier). The box
/// metric uses squared box widths, i.e. plain gradient descent in
/// box-normalized coordinates; pinned variables get scale zero.
struct VariableScaling {
  Eigen::VectorXd tau;    // m
  Eigen::VectorXd alpha;  // nu
};
VariableScaling box_metric(const Boxes& boxes);
VariableScaling unit_metric(Eigen::Index demands, Eigen::Index inputs);

/// Projected step along the scaled direction: variable i moves by
/// -step * scale_i * gradient_i, then clamps into its box.
Schedule scaled_gradient_step(const Schedule& schedule, const Gradients& grads,
                              double step, const Boxes& boxes,
                              const VariableScaling& scaling);

struct LineSearchResult {
  Schedule schedule;
  double cost = 0.0;
  double step = 0.0;  // 0 signals a stall
  int evaluations = 0;
};

/// Backtracking Armijo search along the projection arc of the scaled
/// direction: shrink the step until
///   f(P[x - step D g]) <= f(x) - ls_alpha/step * ||P[x - step D g] - x||^2_Dinv
/// with D = diag(scaling). Returns the incumbent with step 0 when the step
/// underflows 1e-12 or the projection blocks all movement. Throws
/// InfeasibleStartError when the incumbent cost is not finite.
LineSearchResult line_search(const ObjectiveFn& objective,
                             const Schedule& current, double current_cost,
                             const Gradients& grads, const Boxes& boxes,
                             const VariableScaling& scaling,
                             const SolverConfig& cfg);

enum class Termination { converged, stalled, iteration_limit };

struct ContinuationRecord {
  double parameter = 0.0;  // epsilon or vartheta of the round
  double final_cost = 0.0;
  double max_violation = 0.0;
  int iterations = 0;
};

struct SolveReport {
  Schedule schedule;
  std::vector<double> cost_trace;       // concatenated across rounds
  std::vector<double> grad_norm_trace;  // one entry per iteration
  int iterations = 0;
  Termination termination = Termination::converged;
  std::vector<ContinuationRecord> continuation_history;
  ViolationReport violations;
  Eigen::VectorXd per_demand_delay;
};

using IterateObserver =
    std::function<void(int iteration, const Schedule& schedule, double cost)>;

/// Projected gradient descent with backtracking line search at a fixed
/// continuation parameter. Terminates after three consecutive iterations with
/// relative improvement below tol_rel, on a line-search stall, or at max_iter.
SolveReport solve_round(const ObjectiveFn& objective, const Schedule& init,
                        const Boxes& boxes, const SolverConfig& cfg,
                        const IterateObserver& observer = {});

/// Log-barrier pipeline: rounds at eps = epsilon0 / factor^r, warm-started.
/// Requires a node-feasible init (else InfeasibleStartError).
SolveReport solve_barrier_continuation(const ScheduleProblem& problem,
                                       const BasisResponses& basis,
                                       const ObjectiveEvaluator& evaluator,
                                       const Schedule& init,
                                       const SolverConfig& cfg,
                                       const IterateObserver& observer = {});

/// Soft-penalty pipeline: rounds at vartheta = vartheta0 * factor^r, stopping
/// early once the max violation drops to violation_tol. Any init is accepted.
SolveReport solve_penalty_continuation(const ScheduleProblem& problem,
                                       const BasisResponses& basis,
                                       const ObjectiveEvaluator& evaluator,
                                       const Schedule& init,
                                       const SolverConfig& cfg,
                                       const IterateObserver& observer = {});

/// Feasible starting schedule by separating the demands: alpha = 0 and, in
/// demand order, each shifted support starts after the previous one plus a
/// gap that grows by the shortest demand duration until the trajectory is
/// feasible on the grid. The gap also holds the first support off the horizon
/// start, so infeasibility caused by the initial transient alone resolves
/// too. The all-lower-bound schedule is tried first. Throws SeparationError
/// when no gap fits the delay boxes.
Schedule feasible_init(const ScheduleProblem& problem,
                       const BasisResponses& basis, const QuadratureGrid& grid);

}  // namespace rigsched
