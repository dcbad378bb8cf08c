#include "rigsched/irrigation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rigsched {

PadeFragment pade_delay_realization(double t_d) {
  if (!(t_d > 0.0)) {
    throw std::invalid_argument("pade_delay_realization: t_d must be > 0");
  }
  return PadeFragment{2.0 / t_d};
}

namespace {

struct NetworkMatrices {
  Eigen::MatrixXd a, b, c;
  std::vector<Eigen::MatrixXd> e;
  Eigen::VectorXd d;
};

void validate_spec(const NetworkSpec& spec) {
  const auto n = static_cast<Eigen::Index>(spec.pools.size());
  if (n < 1) {
    throw std::invalid_argument("NetworkSpec: need at least one pool");
  }
  for (std::size_t i = 0; i < spec.pools.size(); ++i) {
    const auto& p = spec.pools[i];
    if (!(p.c_in > 0.0) || !(p.c_out > 0.0) || !(p.t_d > 0.0) ||
        !(p.kappa > 0.0) || !(p.phi > 0.0) || !(p.rho > 0.0)) {
      throw std::invalid_argument("NetworkSpec: pool " + std::to_string(i) +
                                  " parameters must all be positive");
    }
  }
  if (spec.u0.size() != n || spec.level_lo.size() != n ||
      spec.level_hi.size() != n) {
    throw std::invalid_argument(
        "NetworkSpec: u0 and level bands need one entry per pool");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(spec.level_lo[i] < spec.u0[i] && spec.u0[i] < spec.level_hi[i])) {
      throw std::invalid_argument(
          "NetworkSpec: need level_lo < u0 < level_hi for pool " +
          std::to_string(i));
    }
  }
  if (spec.demand_to_pool.empty()) {
    throw std::invalid_argument("NetworkSpec: need at least one demand");
  }
  for (std::size_t j = 0; j < spec.demand_to_pool.size(); ++j) {
    if (spec.demand_to_pool[j] < 0 ||
        spec.demand_to_pool[j] >= static_cast<int>(spec.pools.size())) {
      throw std::invalid_argument("NetworkSpec: demand " + std::to_string(j) +
                                  " targets an unknown pool");
    }
  }
}

NetworkMatrices assemble(const NetworkSpec& spec) {
  const int n_pools = static_cast<int>(spec.pools.size());
  const int nx = 4 * n_pools;

  NetworkMatrices net;
  net.a = Eigen::MatrixXd::Zero(nx, nx);
  net.b = Eigen::MatrixXd::Zero(nx, n_pools);

  // q_i = kappa c1 + kappa (phi - rho) c2, as a row over the state vector.
  const auto intake_row = [&](int pool) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nx);
    const auto& p = spec.pools[static_cast<std::size_t>(pool)];
    row[level_state_index(pool) + 2] = p.kappa;
    row[level_state_index(pool) + 3] = p.kappa * (p.phi - p.rho);
    return row;
  };

  for (int i = 0; i < n_pools; ++i) {
    const auto& p = spec.pools[static_cast<std::size_t>(i)];
    const int y = level_state_index(i);
    const int pd = y + 1;
    const int c1 = y + 2;
    const int c2 = y + 3;
    const double a_pade = pade_delay_realization(p.t_d).state_rate;

    // Level: c_in * (2a pd - q_i) - c_out * q_{i+1}  (off-takes enter via E).
    net.a.row(y) -= p.c_in * intake_row(i);
    net.a(y, pd) += p.c_in * 2.0 * a_pade;
    if (i + 1 < n_pools) {
      net.a.row(y) -= p.c_out * intake_row(i + 1);
    }
    // Pade state driven by the commanded intake.
    net.a.row(pd) += intake_row(i);
    net.a(pd, pd) -= a_pade;
    // Controller integrator and lag on the level error u_i - y_i.
    net.a(c1, y) = -1.0;
    net.b(c1, i) = 1.0;
    net.a(c2, y) = -1.0 / p.rho;
    net.a(c2, c2) = -1.0 / p.rho;
    net.b(c2, i) = 1.0 / p.rho;
  }

  net.e.reserve(spec.demand_to_pool.size());
  for (int pool : spec.demand_to_pool) {
    Eigen::MatrixXd ei = Eigen::MatrixXd::Zero(nx, 1);
    ei(level_state_index(pool), 0) =
        -spec.pools[static_cast<std::size_t>(pool)].c_out;
    net.e.push_back(std::move(ei));
  }

  net.c = Eigen::MatrixXd::Zero(2 * n_pools, nx);
  net.d = Eigen::VectorXd::Zero(2 * n_pools);
  for (int i = 0; i < n_pools; ++i) {
    net.c(2 * i, level_state_index(i)) = 1.0;
    net.d[2 * i] = spec.level_hi[i];
    net.c(2 * i + 1, level_state_index(i)) = -1.0;
    net.d[2 * i + 1] = -spec.level_lo[i];
  }
  return net;
}

}  // namespace

Eigen::VectorXd steady_state(const NetworkSpec& spec) {
  validate_spec(spec);
  const NetworkMatrices net = assemble(spec);
  const Eigen::VectorXd x =
      net.a.fullPivLu().solve(-(net.b * spec.u0));
  const double residual = (net.a * x + net.b * spec.u0).lpNorm<Eigen::Infinity>();
  if (!(residual <= 1e-10)) {
    throw std::runtime_error(
        "steady_state: closed-loop equilibrium solve failed (residual " +
        std::to_string(residual) + ")");
  }
  return x;
}

StateSpaceModel build_network(const NetworkSpec& spec) {
  validate_spec(spec);
  NetworkMatrices net = assemble(spec);
  Eigen::VectorXd x0 = steady_state(spec);
  return StateSpaceModel(std::move(net.a), std::move(net.b), std::move(net.e),
                         std::move(net.c), std::move(net.d), std::move(x0),
                         spec.u0);
}

}  // namespace rigsched
