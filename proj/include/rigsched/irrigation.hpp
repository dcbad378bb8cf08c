#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rigsched/state_space.hpp"

namespace rigsched {

/// Physical and controller parameters of one channel pool.
struct PoolParams {
  double c_in = 0.0;   // inflow discharge rate
  double c_out = 0.0;  // outflow discharge rate
  double t_d = 0.0;    // water transport delay, min
  double kappa = 0.0;  // controller gain
  double phi = 0.0;    // controller lead time constant, min
  double rho = 0.0;    // controller lag time constant, min
};

/// One-state all-pass realization of the first-order Pade delay
/// (1 - (t_d/2) s) / (1 + (t_d/2) s):
///   xdot = -state_rate * x + input,   output = 2 * state_rate * x - input.
struct PadeFragment {
  double state_rate = 0.0;  // 2 / t_d
};
PadeFragment pade_delay_realization(double t_d);

/// A series channel of n >= 1 pools with local level controllers, level-band
/// state constraints and per-demand off-take load maps.
struct NetworkSpec {
  std::vector<PoolParams> pools;
  Eigen::VectorXd u0;        // steady water-level references, one per pool
  Eigen::VectorXd level_lo;  // lower level bounds
  Eigen::VectorXd level_hi;  // upper level bounds
  std::vector<int> demand_to_pool;  // demand index -> pool index (0-based)
};

/// State ordering, per pool: (level, pade, controller integrator,
/// controller lag); pool i occupies states 4i..4i+3.
inline int level_state_index(int pool) { return 4 * pool; }

/// Closed-loop state-space model of the network. Per pool: the level
/// integrator fed by the Pade-delayed inflow, the downstream intake of the
/// next pool (zero after the last pool) and the off-take loads; the local
/// controller kappa (phi s + 1) / (s (rho s + 1)) realized as integrator plus
/// first-order lag. Constraint rows per pool: level <= hi, -level <= -lo.
/// x0 is the zero-demand equilibrium at u0.
StateSpaceModel build_network(const NetworkSpec& spec);

/// The zero-demand equilibrium state at u = u0 (levels at reference, all
/// flows and internal states at rest), obtained from the closed-loop linear
/// solve and checked to residual 1e-10.
Eigen::VectorXd steady_state(const NetworkSpec& spec);

}  // namespace rigsched
