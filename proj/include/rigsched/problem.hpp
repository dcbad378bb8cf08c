#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rigsched/basis.hpp"
#include "rigsched/quadrature.hpp"
#include "rigsched/state_space.hpp"

namespace rigsched {

/// Delay penalty h_i: continuously differentiable on the delay box.
struct PenaltySpec {
  enum class Kind { linear, weighted_linear, quadratic };
  Kind kind = Kind::linear;
  double weight = 1.0;
  double reference = 0.0;  // quadratic only: h = weight * (tau - reference)^2

  double value(double tau) const;
  double slope(double tau) const;
  void validate() const;
};

/// One rigid load request: a fixed profile that may only be shifted in time
/// by a delay within [tau_lo, tau_hi], injected through one load channel.
struct DemandRequest {
  PiecewiseSignal profile;
  double tau_lo = 0.0;
  double tau_hi = 0.0;
  PenaltySpec penalty;
  int target_channel = 0;
};

/// Decision variables: per-demand delays and ZOH control deviations.
struct Schedule {
  Eigen::VectorXd tau;    // m
  Eigen::MatrixXd alpha;  // nu x K
};

class ScheduleProblem {
 public:
  ScheduleProblem(StateSpaceModel model, std::vector<DemandRequest> demands,
                  double horizon, double sampling, Eigen::VectorXd u_lo,
                  Eigen::VectorXd u_hi);

  const StateSpaceModel& model() const { return model_; }
  const std::vector<DemandRequest>& demands() const { return demands_; }
  double horizon() const { return horizon_; }
  double sampling() const { return sampling_; }
  const Eigen::VectorXd& u_lo() const { return u_lo_; }
  const Eigen::VectorXd& u_hi() const { return u_hi_; }

  int demand_count() const { return static_cast<int>(demands_.size()); }
  int zoh_intervals() const;  // K = ceil(T / sampling)

  /// Load inputs (profile + resolved channel map) in demand order.
  std::vector<LoadInput> loads() const;
  BasisResponses build_basis() const;

  Schedule zero_schedule() const;
  bool in_boxes(const Schedule& schedule, double tol = 0.0) const;

 private:
  StateSpaceModel model_;
  std::vector<DemandRequest> demands_;
  double horizon_;
  double sampling_;
  Eigen::VectorXd u_lo_, u_hi_;
};

/// Superposed state x(t) = x0bar(t) + sum alpha xubar(t) + sum xvbar(t - tau).
/// Pure; throws std::invalid_argument for t outside [0, horizon].
Eigen::VectorXd state_at(const BasisResponses& basis, const Schedule& schedule,
                         double t);

/// Full superposed trajectory on an ascending time grid (nx x |times|).
Eigen::MatrixXd trajectory_on(const BasisResponses& basis,
                              const Schedule& schedule,
                              std::span<const double> times);

/// Total delay cost sum_i h_i(tau_i) with its gradient.
double total_delay_cost(const Schedule& schedule,
                        const std::vector<DemandRequest>& demands);
Eigen::VectorXd total_delay_cost_gradient(
    const Schedule& schedule, const std::vector<DemandRequest>& demands);

/// Per-constraint-row worst violation over a sampling grid.
struct ViolationReport {
  struct Row {
    double max_violation;  // max_t C_z x(t) - d_z (negative means slack)
    double argmax_time;
  };
  std::vector<Row> rows;
  double overall_max = 0.0;
  double tolerance = 0.0;
  bool feasible = true;
};

ViolationReport max_violation(const BasisResponses& basis,
                              const Schedule& schedule,
                              const QuadratureGrid& grid,
                              double tolerance = 1e-9);

}  // namespace rigsched
