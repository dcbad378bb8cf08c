#include "rigsched/state_space.hpp"

#include <stdexcept>
#include <string>

namespace rigsched {

StateSpaceModel::StateSpaceModel(Eigen::MatrixXd a, Eigen::MatrixXd b,
                                 std::vector<Eigen::MatrixXd> e,
                                 Eigen::MatrixXd c, Eigen::VectorXd d,
                                 Eigen::VectorXd x0, Eigen::VectorXd u0)
    : a_(std::move(a)),
      b_(std::move(b)),
      e_(std::move(e)),
      c_(std::move(c)),
      d_(std::move(d)),
      x0_(std::move(x0)),
      u0_(std::move(u0)) {
  const auto n = a_.rows();
  if (a_.cols() != n) {
    throw std::invalid_argument("StateSpaceModel: A must be square");
  }
  if (b_.rows() != n) {
    throw std::invalid_argument("StateSpaceModel: B row count must match A");
  }
  for (std::size_t i = 0; i < e_.size(); ++i) {
    if (e_[i].rows() != n) {
      throw std::invalid_argument("StateSpaceModel: E[" + std::to_string(i) +
                                  "] row count must match A");
    }
    if (e_[i].cols() < 1) {
      throw std::invalid_argument("StateSpaceModel: E[" + std::to_string(i) +
                                  "] needs at least one column");
    }
    if (!e_[i].allFinite()) {
      throw std::invalid_argument("StateSpaceModel: E[" + std::to_string(i) +
                                  "] must be finite");
    }
  }
  if (c_.cols() != n && c_.rows() > 0) {
    throw std::invalid_argument("StateSpaceModel: C column count must match A");
  }
  if (d_.size() != c_.rows()) {
    throw std::invalid_argument("StateSpaceModel: d length must match C rows");
  }
  if (x0_.size() != n) {
    throw std::invalid_argument("StateSpaceModel: x0 length must match A");
  }
  if (u0_.size() != b_.cols()) {
    throw std::invalid_argument("StateSpaceModel: u0 length must match B cols");
  }
  if (!a_.allFinite() || !b_.allFinite() || !c_.allFinite() ||
      !d_.allFinite() || !x0_.allFinite() || !u0_.allFinite()) {
    throw std::invalid_argument("StateSpaceModel: entries must be finite");
  }
  if (c_.rows() > 0) {
    initial_state_feasible_ = ((c_ * x0_ - d_).array() <= 0.0).all();
  }
}

const Eigen::MatrixXd& StateSpaceModel::load_map(int channel) const {
  if (channel < 0 || channel >= channels()) {
    throw std::invalid_argument("StateSpaceModel: load channel out of range");
  }
  return e_[static_cast<std::size_t>(channel)];
}

}  // namespace rigsched
