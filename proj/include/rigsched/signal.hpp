#pragma once

#include <Eigen/Dense>
#include <vector>

namespace rigsched {

/// Finitely supported piecewise-constant signal. Column j of `values` is the
/// signal value on [breakpoints[j], breakpoints[j+1]); the signal is
/// identically zero outside [breakpoints.front(), breakpoints.back()].
/// Interval membership follows the step(0) = 1 convention: a breakpoint
/// belongs to the interval it opens.
class PiecewiseSignal {
 public:
  /// breakpoints: strictly increasing, size N+1 with N >= 1 segments;
  /// values: channels x N.
  PiecewiseSignal(std::vector<double> breakpoints, Eigen::MatrixXd values);

  /// Constant scalar convenience: value `amplitude` on [start, end).
  static PiecewiseSignal pulse(double start, double end, double amplitude);

  int channels() const { return static_cast<int>(values_.rows()); }
  int segments() const { return static_cast<int>(values_.cols()); }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const Eigen::MatrixXd& values() const { return values_; }

  double support_begin() const { return breakpoints_.front(); }
  double support_end() const { return breakpoints_.back(); }
  double shortest_segment() const;

  /// Signal value at time t (zero outside the support).
  Eigen::VectorXd value_at(double t) const;

  PiecewiseSignal scaled(double factor) const;
  PiecewiseSignal shifted(double delay) const;

 private:
  std::vector<double> breakpoints_;
  Eigen::MatrixXd values_;
};

}  // namespace rigsched
