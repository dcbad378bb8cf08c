#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace rigsched {

/// Uniform composite-trapezoid grid covering [0, T] exactly. The requested
/// step is rounded to the nearest exact divisor T/n.
class QuadratureGrid {
 public:
  QuadratureGrid(double horizon, double requested_step) : horizon_(horizon) {
    if (!(horizon > 0.0) || !(requested_step > 0.0)) {
      throw std::invalid_argument(
          "QuadratureGrid: horizon and step must be > 0");
    }
    const auto n = static_cast<std::size_t>(
        std::max<long long>(1, std::llround(horizon / requested_step)));
    step_ = horizon / static_cast<double>(n);
    nodes_.resize(n + 1);
    for (std::size_t q = 0; q <= n; ++q) {
      nodes_[q] = horizon * (static_cast<double>(q) / static_cast<double>(n));
    }
    nodes_.front() = 0.0;
    nodes_.back() = horizon;
  }

  double horizon() const { return horizon_; }
  double step() const { return step_; }
  const std::vector<double>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }

  /// Trapezoid weight of node q (step/2 at the ends, step inside).
  double weight(std::size_t q) const {
    return (q == 0 || q + 1 == nodes_.size()) ? 0.5 * step_ : step_;
  }

 private:
  double horizon_;
  double step_;
  std::vector<double> nodes_;
};

}  // namespace rigsched
