#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "rigsched/basis.hpp"
#include "rigsched/problem.hpp"
#include "rigsched/quadrature.hpp"

namespace rigsched {

struct BarrierConfig {
  double epsilon = 0.1;  // log-barrier weight
};

struct PenaltyConfig {
  double vartheta = 100.0;  // exponential penalty sharpness
};

struct Gradients {
  Eigen::VectorXd tau;    // m
  Eigen::MatrixXd alpha;  // nu x K
};

struct PenaltyDiagnostics {
  bool saturated = false;  // some exponent hit the overflow clip
};

/// Barrier gradients were requested at a schedule whose trajectory touches or
/// leaves the feasible set on the quadrature grid.
class BarrierDomainError : public std::runtime_error {
 public:
  BarrierDomainError() : std::runtime_error("barrier domain violated") {}
};

/// Evaluates the two augmented objectives and their analytic gradients by
/// composite trapezoid quadrature on a fixed grid. The constraint values of
/// the steady response and of every unit ZOH pulse are cached on the grid at
/// construction; per-schedule work is the demand responses at the shifted
/// times. Cost and gradient share one assembly path, so the analytic
/// gradients are exact derivatives of the quadratured cost wherever the
/// integrand is differentiable.
///
/// Holds a reference to the basis; the caller keeps it alive. Evaluations are
/// const and reentrant.
class ObjectiveEvaluator {
 public:
  ObjectiveEvaluator(const BasisResponses& basis,
                     const ScheduleProblem& problem, QuadratureGrid grid);

  const QuadratureGrid& grid() const { return grid_; }

  /// C x(t_q) - d on the grid (p x Q).
  Eigen::MatrixXd constraint_values(const Schedule& schedule) const;

  /// sum_i h_i(tau_i) - eps * sum_z int log(d_z - C_z x(t)); +infinity when
  /// any grid node is infeasible (the line search rejects such steps).
  double barrier_cost(const Schedule& schedule, const BarrierConfig& cfg) const;

  /// Throws BarrierDomainError at node-infeasible schedules.
  Gradients barrier_gradient(const Schedule& schedule,
                             const BarrierConfig& cfg) const;

  /// sum_i h_i(tau_i) + sum_z int exp(vartheta (C_z x(t) - d_z)); exponents
  /// are clipped at 700 with the saturation flagged in `diag`.
  double penalty_cost(const Schedule& schedule, const PenaltyConfig& cfg,
                      PenaltyDiagnostics* diag = nullptr) const;

  Gradients penalty_gradient(const Schedule& schedule,
                             const PenaltyConfig& cfg,
                             PenaltyDiagnostics* diag = nullptr) const;

  // Single-coordinate probe support (finite-difference harnesses): a probe
  // re-evaluates only the term the coordinate touches and patches the
  // flattened violation vector. Flat layout is column-major over
  // (constraint row z, grid node q), index q*p + z.
  Eigen::VectorXd violation_flat(const Schedule& schedule) const;
  /// C xvbar_demand(t - tau) on the grid, flattened.
  Eigen::VectorXd demand_violation_term(int demand, double tau) const;
  /// C xubar_{input,k} on the grid, flattened (row copy of the cache).
  Eigen::VectorXd zoh_violation_term(int input, int k) const;
  /// Objective value for an explicit violation vector plus delay cost.
  double cost_of_violation(const Eigen::VectorXd& viol_flat,
                           double delay_cost, const BarrierConfig& cfg) const;
  double cost_of_violation(const Eigen::VectorXd& viol_flat,
                           double delay_cost, const PenaltyConfig& cfg,
                           PenaltyDiagnostics* diag = nullptr) const;

 private:
  // Flattened column-major over (constraint row z, node q): index q*p + z.
  struct DemandTerms {
    Eigen::VectorXd cdxv_flat;  // C (A xvbar(t-tau) + E v(t-tau))
  };
  Eigen::VectorXd assemble_violation(const Schedule& schedule,
                                     std::vector<DemandTerms>* terms) const;
  void check_schedule(const Schedule& schedule) const;

  const BasisResponses& basis_;
  std::vector<DemandRequest> demands_;
  Eigen::MatrixXd c_, ca_;           // p x nx
  std::vector<Eigen::MatrixXd> ce_;  // per demand, p x nw
  Eigen::VectorXd d_;
  QuadratureGrid grid_;
  Eigen::VectorXd weights_;   // trapezoid weights replicated per row, p*Q
  Eigen::VectorXd d_flat_;    // d replicated per node, p*Q
  Eigen::VectorXd cx0_flat_;  // C x0bar on the grid, p*Q
  Eigen::MatrixXd cxu_flat_;  // row j*K + k holds C xubar_{j,k}, (nu*K) x p*Q
  int nu_ = 0;
  int zoh_intervals_ = 0;
};

constexpr double kPenaltyExponentClip = 700.0;

}  // namespace rigsched
