#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "rigsched/state_space.hpp"

namespace rigsched {

/// Exact propagation over one held-input segment:
///   e^{As} x_start + (int_0^s e^{Ab} db) input_map u_held,
/// evaluated through the augmented exponential
/// exp([[A, input_map*u_held], [0, 0]] s), so singular A needs no inversion.
/// Throws std::invalid_argument for s < 0 or dimension mismatches.
Eigen::VectorXd propagate_segment(const StateSpaceModel& model,
                                  const Eigen::VectorXd& x_start,
                                  const Eigen::VectorXd& u_held,
                                  const Eigen::MatrixXd& input_map, double s);

/// Exact trajectory sampling of xdot = A x + input_map sig(t), x(0) = x_init,
/// with sig held piecewise-constant and applied from t = 0 on. Sample times
/// must be ascending; columns for negative times return x_init (for a zero
/// x_init this is the causal zero-extension the basis responses need).
Eigen::MatrixXd sample_lti_response(const Eigen::MatrixXd& a,
                                    const Eigen::MatrixXd& input_map,
                                    const PiecewiseSignal& sig,
                                    const Eigen::VectorXd& x_init,
                                    std::span<const double> times);

/// The three basis-response families of the superposition solution:
///   x0bar(t)   — free response from x0 plus the steady-input forcing u0,
///   xubar(i,k) — response to a unit ZOH pulse on input i over
///                [k*sampling, (k+1)*sampling), k = 0..K-1,
///   xvbar(i)   — response to the unshifted load profile i, zero for t < 0.
/// All evaluations are exact for piecewise-constant inputs: segments are
/// propagated with cached matrix exponentials and arbitrary query times split
/// the last partial segment on the fly. Immutable after construction;
/// concurrent read-only use is safe.
class BasisResponses {
 public:
  BasisResponses(StateSpaceModel model, std::vector<LoadInput> loads,
                 double horizon, double sampling);

  const StateSpaceModel& model() const { return model_; }
  double horizon() const { return horizon_; }
  double sampling() const { return sampling_; }
  int zoh_intervals() const { return zoh_intervals_; }  // K
  int load_count() const { return static_cast<int>(loads_.size()); }
  const LoadInput& load(int i) const;

  Eigen::VectorXd x0_at(double t) const;
  Eigen::VectorXd xu_at(int input, int k, double t) const;
  Eigen::VectorXd xv_at(int load, double s) const;
  /// Superposed ZOH-deviation response sum_{i,k} alpha(i,k) xubar_{i,k}(t),
  /// evaluated exactly through the combined deviation signal.
  Eigen::VectorXd zoh_response_at(const Eigen::MatrixXd& alpha, double t) const;

  Eigen::MatrixXd x0_on(std::span<const double> times) const;
  Eigen::MatrixXd xu_on(int input, int k, std::span<const double> times) const;
  /// Column q holds xvbar_load(times[q] - tau).
  Eigen::MatrixXd xv_on(int load, double tau,
                        std::span<const double> times) const;
  Eigen::MatrixXd zoh_response_on(const Eigen::MatrixXd& alpha,
                                  std::span<const double> times) const;

  /// Load profile value v_i(s), clamped to zero for s < 0 (the responses
  /// integrate the profile from time zero only).
  Eigen::VectorXd load_value(int load, double s) const;
  /// Column q holds v_load(times[q] - tau), with the same causal clamp.
  Eigen::MatrixXd load_values_on(int load, double tau,
                                 std::span<const double> times) const;

 private:
  PiecewiseSignal deviation_signal(const Eigen::MatrixXd& alpha) const;
  void check_load(int load) const;

  StateSpaceModel model_;
  std::vector<LoadInput> loads_;
  double horizon_;
  double sampling_;
  int zoh_intervals_;

  // Per-load knot times (0 plus every profile breakpoint > 0) and the exact
  // response states there; arbitrary-time queries propagate from the last
  // knot at or before the query.
  struct LoadCache {
    std::vector<double> knots;
    std::vector<Eigen::VectorXd> states;
  };
  std::vector<LoadCache> load_cache_;
};

/// Builds the basis-response structure for the given model, load inputs,
/// horizon T and ZOH sampling time. Throws std::invalid_argument for
/// non-positive horizon/sampling or sampling > horizon.
BasisResponses build_basis(StateSpaceModel model, std::vector<LoadInput> loads,
                           double horizon, double sampling);

}  // namespace rigsched
