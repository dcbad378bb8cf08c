#include "rigsched/objectives.hpp"

#include <cmath>
#include <limits>

namespace rigsched {

// Constraint matrices are kept flattened column-major over (row z, node q),
// flat index q*p + z, so schedule assembly and the alpha-block contraction
// are single matrix-vector products.

ObjectiveEvaluator::ObjectiveEvaluator(const BasisResponses& basis,
                                       const ScheduleProblem& problem,
                                       QuadratureGrid grid)
    : basis_(basis),
      demands_(problem.demands()),
      c_(problem.model().c()),
      d_(problem.model().d()),
      grid_(std::move(grid)),
      nu_(problem.model().nu()),
      zoh_intervals_(problem.zoh_intervals()) {
  if (grid_.horizon() > basis_.horizon()) {
    throw std::invalid_argument(
        "ObjectiveEvaluator: grid horizon exceeds basis horizon");
  }
  if (basis_.load_count() != problem.demand_count() ||
      basis_.zoh_intervals() != zoh_intervals_) {
    throw std::invalid_argument(
        "ObjectiveEvaluator: basis does not match problem");
  }
  ca_ = c_ * problem.model().a();
  ce_.reserve(demands_.size());
  for (const auto& dem : demands_) {
    ce_.push_back(c_ * problem.model().load_map(dem.target_channel));
  }

  const auto p = static_cast<Eigen::Index>(c_.rows());
  const auto q = static_cast<Eigen::Index>(grid_.size());
  weights_.resize(p * q);
  d_flat_.resize(p * q);
  for (Eigen::Index node = 0; node < q; ++node) {
    for (Eigen::Index z = 0; z < p; ++z) {
      weights_[node * p + z] = grid_.weight(static_cast<std::size_t>(node));
      d_flat_[node * p + z] = d_[z];
    }
  }

  {
    const Eigen::MatrixXd cx0 = c_ * basis_.x0_on(grid_.nodes());
    cx0_flat_ = Eigen::Map<const Eigen::VectorXd>(cx0.data(), cx0.size());
  }
  cxu_flat_.resize(static_cast<Eigen::Index>(nu_) * zoh_intervals_, p * q);
  for (int j = 0; j < nu_; ++j) {
    for (int k = 0; k < zoh_intervals_; ++k) {
      const Eigen::MatrixXd cxu = c_ * basis_.xu_on(j, k, grid_.nodes());
      cxu_flat_.row(j * zoh_intervals_ + k) =
          Eigen::Map<const Eigen::VectorXd>(cxu.data(), cxu.size());
    }
  }
}

void ObjectiveEvaluator::check_schedule(const Schedule& schedule) const {
  if (schedule.tau.size() != static_cast<Eigen::Index>(demands_.size()) ||
      schedule.alpha.rows() != nu_ || schedule.alpha.cols() != zoh_intervals_) {
    throw std::invalid_argument("ObjectiveEvaluator: schedule shape mismatch");
  }
}

Eigen::VectorXd ObjectiveEvaluator::assemble_violation(
    const Schedule& schedule, std::vector<DemandTerms>* terms) const {
  check_schedule(schedule);
  Eigen::VectorXd viol = cx0_flat_;
  if (nu_ > 0) {
    Eigen::VectorXd alpha_flat(static_cast<Eigen::Index>(nu_) *
                               zoh_intervals_);
    for (int j = 0; j < nu_; ++j) {
      for (int k = 0; k < zoh_intervals_; ++k) {
        alpha_flat[j * zoh_intervals_ + k] = schedule.alpha(j, k);
      }
    }
    viol.noalias() += cxu_flat_.transpose() * alpha_flat;
  }
  if (terms) {
    terms->clear();
    terms->resize(demands_.size());
  }
  for (std::size_t i = 0; i < demands_.size(); ++i) {
    const double tau = schedule.tau[static_cast<Eigen::Index>(i)];
    if (terms) {
      const Eigen::MatrixXd xv =
          basis_.xv_on(static_cast<int>(i), tau, grid_.nodes());
      const Eigen::MatrixXd cxv = c_ * xv;
      viol += Eigen::Map<const Eigen::VectorXd>(cxv.data(), cxv.size());
      const Eigen::MatrixXd vals =
          basis_.load_values_on(static_cast<int>(i), tau, grid_.nodes());
      Eigen::MatrixXd cdxv = ca_ * xv;
      cdxv.noalias() += ce_[i] * vals;
      (*terms)[i].cdxv_flat =
          Eigen::Map<const Eigen::VectorXd>(cdxv.data(), cdxv.size());
    } else {
      viol += demand_violation_term(static_cast<int>(i), tau);
    }
  }
  viol -= d_flat_;
  return viol;
}

Eigen::VectorXd ObjectiveEvaluator::violation_flat(
    const Schedule& schedule) const {
  return assemble_violation(schedule, nullptr);
}

Eigen::VectorXd ObjectiveEvaluator::demand_violation_term(int demand,
                                                          double tau) const {
  const Eigen::MatrixXd cxv =
      c_ * basis_.xv_on(demand, tau, grid_.nodes());
  return Eigen::Map<const Eigen::VectorXd>(cxv.data(), cxv.size());
}

Eigen::VectorXd ObjectiveEvaluator::zoh_violation_term(int input,
                                                       int k) const {
  if (input < 0 || input >= nu_ || k < 0 || k >= zoh_intervals_) {
    throw std::invalid_argument(
        "ObjectiveEvaluator: ZOH term index out of range");
  }
  return cxu_flat_.row(input * zoh_intervals_ + k).transpose();
}

double ObjectiveEvaluator::cost_of_violation(const Eigen::VectorXd& viol_flat,
                                             double delay_cost,
                                             const BarrierConfig& cfg) const {
  if (!(cfg.epsilon > 0.0)) {
    throw std::invalid_argument("BarrierConfig: epsilon must be > 0");
  }
  if (viol_flat.size() == 0) return delay_cost;
  if (viol_flat.maxCoeff() >= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return delay_cost -
         cfg.epsilon * weights_.dot((-viol_flat.array()).log().matrix());
}

double ObjectiveEvaluator::cost_of_violation(const Eigen::VectorXd& viol_flat,
                                             double delay_cost,
                                             const PenaltyConfig& cfg,
                                             PenaltyDiagnostics* diag) const {
  if (!(cfg.vartheta > 0.0)) {
    throw std::invalid_argument("PenaltyConfig: vartheta must be > 0");
  }
  if (diag) diag->saturated = false;
  if (viol_flat.size() == 0) return delay_cost;
  Eigen::ArrayXd expo = cfg.vartheta * viol_flat.array();
  if (diag && (expo > kPenaltyExponentClip).any()) diag->saturated = true;
  return delay_cost +
         weights_.dot(expo.min(kPenaltyExponentClip).exp().matrix());
}

Eigen::MatrixXd ObjectiveEvaluator::constraint_values(
    const Schedule& schedule) const {
  const Eigen::VectorXd flat = assemble_violation(schedule, nullptr);
  return Eigen::Map<const Eigen::MatrixXd>(
      flat.data(), c_.rows(), static_cast<Eigen::Index>(grid_.size()));
}

double ObjectiveEvaluator::barrier_cost(const Schedule& schedule,
                                        const BarrierConfig& cfg) const {
  const double delay = total_delay_cost(schedule, demands_);
  if (c_.rows() == 0) {
    check_schedule(schedule);
    if (!(cfg.epsilon > 0.0)) {
      throw std::invalid_argument("BarrierConfig: epsilon must be > 0");
    }
    return delay;
  }
  return cost_of_violation(assemble_violation(schedule, nullptr), delay, cfg);
}

Gradients ObjectiveEvaluator::barrier_gradient(const Schedule& schedule,
                                               const BarrierConfig& cfg) const {
  if (!(cfg.epsilon > 0.0)) {
    throw std::invalid_argument("BarrierConfig: epsilon must be > 0");
  }
  Gradients g;
  g.tau = total_delay_cost_gradient(schedule, demands_);
  g.alpha = Eigen::MatrixXd::Zero(nu_, zoh_intervals_);
  if (c_.rows() == 0) {
    check_schedule(schedule);
    return g;
  }
  std::vector<DemandTerms> terms;
  const Eigen::VectorXd viol = assemble_violation(schedule, &terms);
  if (viol.maxCoeff() >= 0.0) {
    throw BarrierDomainError();
  }
  // eps * w / slack, the weighted barrier density.
  const Eigen::VectorXd rw =
      (cfg.epsilon * weights_.array() / (-viol.array())).matrix();
  for (std::size_t i = 0; i < demands_.size(); ++i) {
    g.tau[static_cast<Eigen::Index>(i)] -= rw.dot(terms[i].cdxv_flat);
  }
  if (nu_ > 0) {
    const Eigen::VectorXd alpha_grad = cxu_flat_ * rw;
    for (int j = 0; j < nu_; ++j) {
      for (int k = 0; k < zoh_intervals_; ++k) {
        g.alpha(j, k) = alpha_grad[j * zoh_intervals_ + k];
      }
    }
  }
  return g;
}

double ObjectiveEvaluator::penalty_cost(const Schedule& schedule,
                                        const PenaltyConfig& cfg,
                                        PenaltyDiagnostics* diag) const {
  const double delay = total_delay_cost(schedule, demands_);
  if (c_.rows() == 0) {
    check_schedule(schedule);
    if (!(cfg.vartheta > 0.0)) {
      throw std::invalid_argument("PenaltyConfig: vartheta must be > 0");
    }
    if (diag) diag->saturated = false;
    return delay;
  }
  return cost_of_violation(assemble_violation(schedule, nullptr), delay, cfg,
                           diag);
}

Gradients ObjectiveEvaluator::penalty_gradient(const Schedule& schedule,
                                               const PenaltyConfig& cfg,
                                               PenaltyDiagnostics* diag) const {
  if (!(cfg.vartheta > 0.0)) {
    throw std::invalid_argument("PenaltyConfig: vartheta must be > 0");
  }
  Gradients g;
  g.tau = total_delay_cost_gradient(schedule, demands_);
  g.alpha = Eigen::MatrixXd::Zero(nu_, zoh_intervals_);
  if (diag) diag->saturated = false;
  if (c_.rows() == 0) {
    check_schedule(schedule);
    return g;
  }
  std::vector<DemandTerms> terms;
  const Eigen::VectorXd viol = assemble_violation(schedule, &terms);
  Eigen::ArrayXd expo = cfg.vartheta * viol.array();
  if (diag && (expo > kPenaltyExponentClip).any()) diag->saturated = true;
  const Eigen::VectorXd ew =
      cfg.vartheta *
      (weights_.array() * expo.min(kPenaltyExponentClip).exp()).matrix();
  for (std::size_t i = 0; i < demands_.size(); ++i) {
    g.tau[static_cast<Eigen::Index>(i)] -= ew.dot(terms[i].cdxv_flat);
  }
  if (nu_ > 0) {
    const Eigen::VectorXd alpha_grad = cxu_flat_ * ew;
    for (int j = 0; j < nu_; ++j) {
      for (int k = 0; k < zoh_intervals_; ++k) {
        g.alpha(j, k) = alpha_grad[j * zoh_intervals_ + k];
      }
    }
  }
  return g;
}

}  // namespace rigsched
