#include "rigsched/problem.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rigsched {

double PenaltySpec::value(double tau) const {
  switch (kind) {
    case Kind::linear:
    case Kind::weighted_linear:
      return weight * tau;
    case Kind::quadratic:
      return weight * (tau - reference) * (tau - reference);
  }
  return 0.0;
}

double PenaltySpec::slope(double tau) const {
  switch (kind) {
    case Kind::linear:
    case Kind::weighted_linear:
      return weight;
    case Kind::quadratic:
      return 2.0 * weight * (tau - reference);
  }
  return 0.0;
}

void PenaltySpec::validate() const {
  if (!(weight > 0.0)) {
    throw std::invalid_argument("PenaltySpec: weight must be > 0");
  }
  if (!std::isfinite(reference)) {
    throw std::invalid_argument("PenaltySpec: reference must be finite");
  }
}

ScheduleProblem::ScheduleProblem(StateSpaceModel model,
                                 std::vector<DemandRequest> demands,
                                 double horizon, double sampling,
                                 Eigen::VectorXd u_lo, Eigen::VectorXd u_hi)
    : model_(std::move(model)),
      demands_(std::move(demands)),
      horizon_(horizon),
      sampling_(sampling),
      u_lo_(std::move(u_lo)),
      u_hi_(std::move(u_hi)) {
  if (demands_.empty()) {
    throw std::invalid_argument("ScheduleProblem: need at least one demand");
  }
  if (!(horizon_ > 0.0) || !(sampling_ > 0.0) || sampling_ > horizon_) {
    throw std::invalid_argument(
        "ScheduleProblem: need 0 < sampling <= horizon");
  }
  if (u_lo_.size() != model_.nu() || u_hi_.size() != model_.nu()) {
    throw std::invalid_argument(
        "ScheduleProblem: deviation bounds must have one entry per input");
  }
  for (int j = 0; j < model_.nu(); ++j) {
    if (!(u_lo_[j] <= u_hi_[j])) {
      throw std::invalid_argument(
          "ScheduleProblem: u_lo must not exceed u_hi");
    }
  }
  for (std::size_t i = 0; i < demands_.size(); ++i) {
    const auto& dem = demands_[i];
    const std::string tag = "demand " + std::to_string(i);
    if (!(dem.tau_lo >= 0.0)) {
      throw std::invalid_argument("ScheduleProblem: " + tag +
                                  ": tau_lo must be >= 0");
    }
    if (!(dem.tau_lo <= dem.tau_hi)) {
      throw std::invalid_argument("ScheduleProblem: " + tag +
                                  ": tau_lo must not exceed tau_hi");
    }
    dem.penalty.validate();
    if (dem.target_channel < 0 || dem.target_channel >= model_.channels()) {
      throw std::invalid_argument("ScheduleProblem: " + tag +
                                  ": target channel out of range");
    }
    if (model_.load_map(dem.target_channel).cols() !=
        dem.profile.channels()) {
      throw std::invalid_argument("ScheduleProblem: " + tag +
                                  ": profile channels mismatch load map");
    }
  }
}

int ScheduleProblem::zoh_intervals() const {
  return static_cast<int>(std::ceil(horizon_ / sampling_));
}

std::vector<LoadInput> ScheduleProblem::loads() const {
  std::vector<LoadInput> out;
  out.reserve(demands_.size());
  for (const auto& dem : demands_) {
    out.push_back(LoadInput{model_.load_map(dem.target_channel), dem.profile});
  }
  return out;
}

BasisResponses ScheduleProblem::build_basis() const {
  return rigsched::build_basis(model_, loads(), horizon_, sampling_);
}

Schedule ScheduleProblem::zero_schedule() const {
  Schedule s;
  s.tau = Eigen::VectorXd::Zero(demand_count());
  for (int i = 0; i < demand_count(); ++i) {
    // All-zero decision variables, projected into the delay box.
    s.tau[i] = demands_[static_cast<std::size_t>(i)].tau_lo;
  }
  s.alpha = Eigen::MatrixXd::Zero(model_.nu(), zoh_intervals());
  return s;
}

bool ScheduleProblem::in_boxes(const Schedule& schedule, double tol) const {
  if (schedule.tau.size() != demand_count() ||
      schedule.alpha.rows() != model_.nu() ||
      schedule.alpha.cols() != zoh_intervals()) {
    return false;
  }
  for (int i = 0; i < demand_count(); ++i) {
    const auto& dem = demands_[static_cast<std::size_t>(i)];
    if (schedule.tau[i] < dem.tau_lo - tol ||
        schedule.tau[i] > dem.tau_hi + tol) {
      return false;
    }
  }
  for (int j = 0; j < model_.nu(); ++j) {
    for (int k = 0; k < zoh_intervals(); ++k) {
      if (schedule.alpha(j, k) < u_lo_[j] - tol ||
          schedule.alpha(j, k) > u_hi_[j] + tol) {
        return false;
      }
    }
  }
  return true;
}

Eigen::VectorXd state_at(const BasisResponses& basis, const Schedule& schedule,
                         double t) {
  if (t < 0.0 || t > basis.horizon()) {
    throw std::invalid_argument("state_at: t outside [0, horizon]");
  }
  const double times[1] = {t};
  return trajectory_on(basis, schedule, times).col(0);
}

Eigen::MatrixXd trajectory_on(const BasisResponses& basis,
                              const Schedule& schedule,
                              std::span<const double> times) {
  if (schedule.tau.size() != basis.load_count()) {
    throw std::invalid_argument("trajectory_on: tau size mismatch");
  }
  Eigen::MatrixXd x = basis.x0_on(times);
  if (basis.model().nu() > 0) {
    x += basis.zoh_response_on(schedule.alpha, times);
  }
  for (int i = 0; i < basis.load_count(); ++i) {
    x += basis.xv_on(i, schedule.tau[i], times);
  }
  return x;
}

double total_delay_cost(const Schedule& schedule,
                        const std::vector<DemandRequest>& demands) {
  if (schedule.tau.size() != static_cast<Eigen::Index>(demands.size())) {
    throw std::invalid_argument("total_delay_cost: tau size mismatch");
  }
  double cost = 0.0;
  for (std::size_t i = 0; i < demands.size(); ++i) {
    cost += demands[i].penalty.value(schedule.tau[static_cast<Eigen::Index>(i)]);
  }
  return cost;
}

Eigen::VectorXd total_delay_cost_gradient(
    const Schedule& schedule, const std::vector<DemandRequest>& demands) {
  if (schedule.tau.size() != static_cast<Eigen::Index>(demands.size())) {
    throw std::invalid_argument("total_delay_cost_gradient: tau size mismatch");
  }
  Eigen::VectorXd grad(demands.size());
  for (std::size_t i = 0; i < demands.size(); ++i) {
    grad[static_cast<Eigen::Index>(i)] =
        demands[i].penalty.slope(schedule.tau[static_cast<Eigen::Index>(i)]);
  }
  return grad;
}

ViolationReport max_violation(const BasisResponses& basis,
                              const Schedule& schedule,
                              const QuadratureGrid& grid, double tolerance) {
  const auto& model = basis.model();
  const Eigen::MatrixXd x = trajectory_on(basis, schedule, grid.nodes());
  const Eigen::MatrixXd viol =
      (model.c() * x).colwise() - model.d();  // p x Q

  ViolationReport report;
  report.tolerance = tolerance;
  report.rows.resize(static_cast<std::size_t>(model.rows()));
  report.overall_max = -std::numeric_limits<double>::infinity();
  for (int z = 0; z < model.rows(); ++z) {
    Eigen::Index argmax = 0;
    const double worst = viol.row(z).maxCoeff(&argmax);
    report.rows[static_cast<std::size_t>(z)] = ViolationReport::Row{
        worst, grid.nodes()[static_cast<std::size_t>(argmax)]};
    report.overall_max = std::max(report.overall_max, worst);
  }
  if (model.rows() == 0) report.overall_max = 0.0;
  report.feasible = report.overall_max <= tolerance;
  return report;
}

}  // namespace rigsched
