#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "rigsched/state_space.hpp"

namespace rigsched {

/// Classical fixed-step RK4 integration of
///   xdot = A x + B u(t) + sum_i map_i w_i(t),   x(0) = model.x0,
/// sampled at the given ascending times (all >= 0). Steps are aligned with
/// every input breakpoint and every sample time, so held inputs are never
/// straddled and samples need no interpolation. Intended as an independent
/// test oracle for the exact propagation machinery; it shares no code with it.
///
/// `u_total` is the full control signal (steady part included); when absent
/// the model's constant u0 is applied throughout.
/// Returns an nx x |times| matrix (column per sample time).
Eigen::MatrixXd simulate_ode_rk4(const StateSpaceModel& model,
                                 const std::optional<PiecewiseSignal>& u_total,
                                 const std::vector<LoadInput>& loads,
                                 std::span<const double> sample_times,
                                 double step);

}  // namespace rigsched
