#pragma once

#include <cstdint>
#include <vector>

#include "rigsched/objectives.hpp"
#include "rigsched/solver.hpp"

namespace rigsched {

/// Central-finite-difference validation of the analytic gradients at random
/// in-box schedules. Barrier mode draws feasible schedules by perturbing the
/// separated initializer and keeping a slack margin; penalty mode draws
/// uniformly in the boxes and redraws saturated points. The reported error is
///   |g_analytic - g_fd| / max(1, |g_analytic|, |g_fd|)
/// per coordinate, worst over coordinates and schedules.
struct GradCheckOptions {
  SolveMode mode = SolveMode::penalty;
  double epsilon = 0.1;
  double vartheta = 100.0;
  int num_schedules = 20;
  std::uint64_t seed = 20240601;
  // h = fd_rel_step * (1 + |coordinate|). Non-positive selects the automatic
  // step 1e-4 (barrier) or min(1e-4, 1e-3 / vartheta) (penalty): the
  // truncation error of a central difference grows like (vartheta * h)^2, so
  // sharper penalties need smaller probes.
  double fd_rel_step = 0.0;
  double feasibility_margin = 1e-2;  // feasible draws keep this much slack
  // Barrier mode always draws feasible schedules (the objective demands it).
  // Penalty mode draws uniformly in the boxes unless this asks for the same
  // feasible-perturbation protocol.
  bool feasible_draws = false;
};

struct GradCheckResult {
  double worst_rel_error = 0.0;
  double worst_abs_error = 0.0;
  int checked_schedules = 0;
  int coordinates = 0;
  std::vector<double> per_schedule_worst;
};

GradCheckResult run_gradient_check(const ScheduleProblem& problem,
                                   const BasisResponses& basis,
                                   const ObjectiveEvaluator& evaluator,
                                   const GradCheckOptions& options);

}  // namespace rigsched
