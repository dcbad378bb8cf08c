#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rigsched/signal.hpp"

namespace rigsched {

/// Constrained continuous-time LTI system
///   xdot = A x + B u + sum_i E_i w_i,   x(0) = x0,
/// with the state feasibility set {x | C x <= d} and steady control u0.
class StateSpaceModel {
 public:
  StateSpaceModel(Eigen::MatrixXd a, Eigen::MatrixXd b,
                  std::vector<Eigen::MatrixXd> e, Eigen::MatrixXd c,
                  Eigen::VectorXd d, Eigen::VectorXd x0, Eigen::VectorXd u0);

  int nx() const { return static_cast<int>(a_.rows()); }
  int nu() const { return static_cast<int>(b_.cols()); }
  int rows() const { return static_cast<int>(c_.rows()); }  // p
  int channels() const { return static_cast<int>(e_.size()); }

  const Eigen::MatrixXd& a() const { return a_; }
  const Eigen::MatrixXd& b() const { return b_; }
  const std::vector<Eigen::MatrixXd>& e() const { return e_; }
  const Eigen::MatrixXd& load_map(int channel) const;
  const Eigen::MatrixXd& c() const { return c_; }
  const Eigen::VectorXd& d() const { return d_; }
  const Eigen::VectorXd& x0() const { return x0_; }
  const Eigen::VectorXd& u0() const { return u0_; }

  /// Whether C x0 <= d component-wise. Barrier-mode pipelines require this;
  /// penalty-mode ones only record it.
  bool initial_state_feasible() const { return initial_state_feasible_; }

 private:
  Eigen::MatrixXd a_, b_;
  std::vector<Eigen::MatrixXd> e_;
  Eigen::MatrixXd c_;
  Eigen::VectorXd d_, x0_, u0_;
  bool initial_state_feasible_ = true;
};

/// One load input: a piecewise-constant profile driving the state through a
/// fixed input map (an E_i column block of the model).
struct LoadInput {
  Eigen::MatrixXd input_map;  // nx x nw
  PiecewiseSignal profile;    // nw channels
};

}  // namespace rigsched
