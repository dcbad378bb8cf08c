#include "rigsched/signal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rigsched {

PiecewiseSignal::PiecewiseSignal(std::vector<double> breakpoints,
                                 Eigen::MatrixXd values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.size() < 2) {
    throw std::invalid_argument("PiecewiseSignal: need at least one segment");
  }
  for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i] < breakpoints_[i + 1])) {
      throw std::invalid_argument(
          "PiecewiseSignal: breakpoints must be strictly increasing");
    }
  }
  for (double t : breakpoints_) {
    if (!std::isfinite(t)) {
      throw std::invalid_argument("PiecewiseSignal: breakpoints must be finite");
    }
  }
  if (values_.cols() != static_cast<Eigen::Index>(breakpoints_.size()) - 1) {
    throw std::invalid_argument(
        "PiecewiseSignal: values must have one column per segment");
  }
  if (values_.rows() < 1) {
    throw std::invalid_argument("PiecewiseSignal: need at least one channel");
  }
  if (!values_.allFinite()) {
    throw std::invalid_argument("PiecewiseSignal: values must be finite");
  }
}

PiecewiseSignal PiecewiseSignal::pulse(double start, double end,
                                       double amplitude) {
  Eigen::MatrixXd v(1, 1);
  v(0, 0) = amplitude;
  return PiecewiseSignal({start, end}, v);
}

double PiecewiseSignal::shortest_segment() const {
  double best = breakpoints_[1] - breakpoints_[0];
  for (std::size_t i = 1; i + 1 < breakpoints_.size(); ++i) {
    best = std::min(best, breakpoints_[i + 1] - breakpoints_[i]);
  }
  return best;
}

Eigen::VectorXd PiecewiseSignal::value_at(double t) const {
  if (t < breakpoints_.front() || t >= breakpoints_.back()) {
    return Eigen::VectorXd::Zero(values_.rows());
  }
  // Last breakpoint <= t: the segment opened at or before t.
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  const auto seg = static_cast<Eigen::Index>(it - breakpoints_.begin()) - 1;
  return values_.col(seg);
}

PiecewiseSignal PiecewiseSignal::scaled(double factor) const {
  return PiecewiseSignal(breakpoints_, values_ * factor);
}

PiecewiseSignal PiecewiseSignal::shifted(double delay) const {
  std::vector<double> b = breakpoints_;
  for (double& t : b) t += delay;
  return PiecewiseSignal(std::move(b), values_);
}

}  // namespace rigsched
