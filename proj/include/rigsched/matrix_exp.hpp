#pragma once

#include <Eigen/Dense>

namespace rigsched {

/// Dense matrix exponential e^M via scaling-and-squaring with a Pade core
/// (orders 3/5/7/9/13 selected by the 1-norm of M).
/// Throws std::invalid_argument on non-square or non-finite input.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& m);

/// State-transition pair for the LTI flow: Phi(h) = e^{Ah} and
/// Gamma(h) = \int_0^h e^{A b} db, computed jointly from the augmented
/// exponential exp([[A, I], [0, 0]] h). Works for singular A.
struct TransitionPair {
  Eigen::MatrixXd phi;    // nxn
  Eigen::MatrixXd gamma;  // nxn
};
TransitionPair transition_pair(const Eigen::MatrixXd& a, double h);

}  // namespace rigsched
