#include "rigsched/gradcheck.hpp"

#include <cmath>
#include <random>

namespace rigsched {
namespace {

// Bit-derived uniforms keep draws identical across standard libraries.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : engine_(seed) {}
  double unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double range(double lo, double hi) { return lo + (hi - lo) * unit(); }
  double symmetric(double scale) { return (2.0 * unit() - 1.0) * scale; }

 private:
  std::mt19937_64 engine_;
};

Schedule random_in_box(const ScheduleProblem& problem, const Boxes& boxes,
                       Uniform& rng) {
  Schedule s = problem.zero_schedule();
  for (Eigen::Index i = 0; i < s.tau.size(); ++i) {
    s.tau[i] = rng.range(boxes.tau_lo[i], boxes.tau_hi[i]);
  }
  for (Eigen::Index j = 0; j < s.alpha.rows(); ++j) {
    for (Eigen::Index k = 0; k < s.alpha.cols(); ++k) {
      s.alpha(j, k) = rng.range(boxes.alpha_lo[j], boxes.alpha_hi[j]);
    }
  }
  return s;
}

Schedule perturb_feasible(const BasisResponses& basis,
                          const ObjectiveEvaluator& evaluator,
                          const Schedule& base, const Boxes& boxes,
                          double margin, Uniform& rng) {
  double tau_scale = 10.0;
  double alpha_frac = 0.3;
  for (int attempt = 0; attempt < 60; ++attempt) {
    Schedule s = base;
    for (Eigen::Index i = 0; i < s.tau.size(); ++i) {
      s.tau[i] = project_box(base.tau[i] + rng.symmetric(tau_scale),
                             boxes.tau_lo[i], boxes.tau_hi[i]);
    }
    for (Eigen::Index j = 0; j < s.alpha.rows(); ++j) {
      const double half =
          0.5 * (boxes.alpha_hi[j] - boxes.alpha_lo[j]) * alpha_frac;
      for (Eigen::Index k = 0; k < s.alpha.cols(); ++k) {
        s.alpha(j, k) = project_box(base.alpha(j, k) + rng.symmetric(half),
                                    boxes.alpha_lo[j], boxes.alpha_hi[j]);
      }
    }
    const ViolationReport viol =
        max_violation(basis, s, evaluator.grid());
    if (viol.overall_max <= -margin) {
      return s;
    }
    if ((attempt + 1) % 15 == 0) {
      tau_scale *= 0.5;
      alpha_frac *= 0.5;
    }
  }
  return base;  // the separated initializer itself is feasible
}

}  // namespace

GradCheckResult run_gradient_check(const ScheduleProblem& problem,
                                   const BasisResponses& basis,
                                   const ObjectiveEvaluator& evaluator,
                                   const GradCheckOptions& options) {
  const Boxes boxes = problem_boxes(problem);
  Uniform rng(options.seed);
  const bool barrier = options.mode == SolveMode::barrier;
  const double fd_rel =
      options.fd_rel_step > 0.0
          ? options.fd_rel_step
          : (barrier ? 1e-5 : std::min(1e-4, 1e-3 / options.vartheta));

  const BarrierConfig bc{options.epsilon};
  const PenaltyConfig pc{options.vartheta};
  const auto gradient = [&](const Schedule& s) {
    return barrier ? evaluator.barrier_gradient(s, bc)
                   : evaluator.penalty_gradient(s, pc);
  };

  const bool feasible_draws = barrier || options.feasible_draws;
  Schedule separated;
  if (feasible_draws) {
    separated = feasible_init(problem, basis, evaluator.grid());
  }

  GradCheckResult result;
  result.coordinates =
      problem.demand_count() + problem.model().nu() * problem.zoh_intervals();

  for (int draw = 0; draw < options.num_schedules; ++draw) {
    Schedule s;
    if (feasible_draws) {
      s = perturb_feasible(basis, evaluator, separated, boxes,
                           options.feasibility_margin, rng);
    } else {
      s = random_in_box(problem, boxes, rng);
      // A clipped exponent would decouple the analytic form from the cost.
      PenaltyDiagnostics diag;
      for (int redraw = 0; redraw < 50; ++redraw) {
        evaluator.penalty_cost(s, pc, &diag);
        if (!diag.saturated) break;
        s = random_in_box(problem, boxes, rng);
      }
    }

    const Gradients g = gradient(s);
    double schedule_worst = 0.0;

    // Single-coordinate probes patch the assembled violation vector instead
    // of re-propagating every demand response.
    const Eigen::VectorXd viol_base = evaluator.violation_flat(s);
    const double delay_base = total_delay_cost(s, problem.demands());
    const auto cost_of = [&](const Eigen::VectorXd& viol, double delay) {
      return barrier ? evaluator.cost_of_violation(viol, delay, bc)
                     : evaluator.cost_of_violation(viol, delay, pc);
    };

    const auto record = [&](double analytic, double fd) {
      const double abs_err = std::abs(analytic - fd);
      const double rel =
          abs_err / std::max({1.0, std::abs(analytic), std::abs(fd)});
      schedule_worst = std::max(schedule_worst, rel);
      result.worst_abs_error = std::max(result.worst_abs_error, abs_err);
    };

    for (Eigen::Index i = 0; i < s.tau.size(); ++i) {
      const double tau = s.tau[i];
      const Eigen::VectorXd own =
          evaluator.demand_violation_term(static_cast<int>(i), tau);
      double h = fd_rel * (1.0 + std::abs(tau));
      double fp = 0.0;
      double fm = 0.0;
      // With a healthy slack margin both probes stay finite; shrink the step
      // if a barrier probe still leaves the feasible set.
      for (int shrink = 0; shrink < 4; ++shrink) {
        Schedule probe = s;
        probe.tau[i] = tau + h;
        fp = cost_of(
            viol_base - own +
                evaluator.demand_violation_term(static_cast<int>(i), tau + h),
            total_delay_cost(probe, problem.demands()));
        probe.tau[i] = tau - h;
        fm = cost_of(
            viol_base - own +
                evaluator.demand_violation_term(static_cast<int>(i), tau - h),
            total_delay_cost(probe, problem.demands()));
        if (std::isfinite(fp) && std::isfinite(fm)) break;
        h *= 0.1;
      }
      if (!std::isfinite(fp) || !std::isfinite(fm)) continue;
      record(g.tau[i], (fp - fm) / (2.0 * h));
    }
    for (Eigen::Index j = 0; j < s.alpha.rows(); ++j) {
      for (Eigen::Index k = 0; k < s.alpha.cols(); ++k) {
        const Eigen::VectorXd term = evaluator.zoh_violation_term(
            static_cast<int>(j), static_cast<int>(k));
        double h = fd_rel * (1.0 + std::abs(s.alpha(j, k)));
        double fp = 0.0;
        double fm = 0.0;
        for (int shrink = 0; shrink < 4; ++shrink) {
          fp = cost_of(viol_base + h * term, delay_base);
          fm = cost_of(viol_base - h * term, delay_base);
          if (std::isfinite(fp) && std::isfinite(fm)) break;
          h *= 0.1;
        }
        if (!std::isfinite(fp) || !std::isfinite(fm)) continue;
        record(g.alpha(j, k), (fp - fm) / (2.0 * h));
      }
    }

    result.per_schedule_worst.push_back(schedule_worst);
    result.worst_rel_error = std::max(result.worst_rel_error, schedule_worst);
    ++result.checked_schedules;
  }
  return result;
}

}  // namespace rigsched
