#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>

#include "rigsched/irrigation.hpp"
#include "rigsched/ode_oracle.hpp"
#include "support/test_models.hpp"

using namespace rigsched;

TEST_CASE("first-order Pade fragment") {
  CHECK(pade_delay_realization(5.0).state_rate == doctest::Approx(0.4));
  CHECK_THROWS_AS(pade_delay_realization(0.0), std::invalid_argument);
  CHECK_THROWS_AS(pade_delay_realization(-1.0), std::invalid_argument);

  // Unit-step output at t = 0+ is -1 (initial inverse response).
  const PadeFragment frag = pade_delay_realization(5.0);
  const double x0 = 0.0;
  CHECK(2.0 * frag.state_rate * x0 - 1.0 == doctest::Approx(-1.0));

  // All-pass: |(a - jw) / (a + jw)| = 1, evaluated through the realization
  // transfer 2a/(jw + a) - 1.
  for (double t_d : {5.0, 6.0}) {
    const double a = pade_delay_realization(t_d).state_rate;
    for (double omega : {0.01, 0.1, 1.0}) {
      const std::complex<double> jw(0.0, omega);
      const std::complex<double> g = 2.0 * a / (jw + a) - 1.0;
      CHECK(std::abs(g) == doctest::Approx(1.0).epsilon(1e-12));
    }
    // DC gain is exactly 1.
    CHECK(2.0 * a / a - 1.0 == doctest::Approx(1.0));
  }
}

TEST_CASE("controller realization matches kappa (phi s + 1)/(s (rho s + 1))") {
  for (const auto& pool : testsup::table_network().pools) {
    for (double omega : {0.01, 0.1, 1.0}) {
      const std::complex<double> s(0.0, omega);
      const std::complex<double> reference =
          pool.kappa * (pool.phi * s + 1.0) / (s * (pool.rho * s + 1.0));
      const std::complex<double> realized =
          pool.kappa / s +
          pool.kappa * (pool.phi - pool.rho) / (pool.rho * s + 1.0);
      CHECK(std::abs(realized - reference) < 1e-12 * std::abs(reference));
    }
  }
}

TEST_CASE("two-pool network has the documented shape") {
  const StateSpaceModel model = build_network(testsup::table_network());
  CHECK(model.nx() == 8);
  CHECK(model.nu() == 2);
  CHECK(model.rows() == 4);
  CHECK(model.channels() == 6);
  Eigen::VectorXd expected_d(4);
  expected_d << 9.7, -9.4, 9.7, -9.5;
  CHECK((model.d() - expected_d).lpNorm<Eigen::Infinity>() == 0.0);

  // Off-takes drain their pool's level integrator at rate c_out.
  CHECK(model.load_map(0)(level_state_index(0), 0) == doctest::Approx(-0.0363));
  CHECK(model.load_map(3)(level_state_index(1), 0) == doctest::Approx(-0.0258));
  CHECK(model.load_map(0).cwiseAbs().sum() == doctest::Approx(0.0363));
}

TEST_CASE("steady state sits at the references with zero flows") {
  const NetworkSpec spec = testsup::table_network();
  const Eigen::VectorXd x = steady_state(spec);
  const StateSpaceModel model = build_network(spec);
  CHECK((model.a() * x + model.b() * spec.u0).lpNorm<Eigen::Infinity>() <=
        1e-10);
  CHECK(x[level_state_index(0)] == doctest::Approx(9.50).epsilon(1e-12));
  CHECK(x[level_state_index(1)] == doctest::Approx(9.55).epsilon(1e-12));
  for (int pool = 0; pool < 2; ++pool) {
    for (int offset = 1; offset < 4; ++offset) {
      CHECK(std::abs(x[level_state_index(pool) + offset]) < 1e-10);
    }
  }
  // The equilibrium is strictly inside the level bands.
  CHECK(((model.c() * x - model.d()).array() < 0.0).all());
}

TEST_CASE("closed loop is Hurwitz with margin") {
  const StateSpaceModel model = build_network(testsup::table_network());
  const Eigen::EigenSolver<Eigen::MatrixXd> eig(model.a());
  CHECK(eig.eigenvalues().real().maxCoeff() < -1e-6);
}

TEST_CASE("constant references hold the levels for 500 minutes") {
  const StateSpaceModel model = build_network(testsup::table_network());
  std::vector<double> times;
  for (int q = 0; q <= 50; ++q) times.push_back(10.0 * q);
  const Eigen::MatrixXd traj =
      simulate_ode_rk4(model, std::nullopt, {}, times, 5e-3);
  for (std::size_t q = 0; q < times.size(); ++q) {
    CHECK((traj.col(static_cast<Eigen::Index>(q)) - model.x0())
              .lpNorm<Eigen::Infinity>() < 1e-8);
  }
}

TEST_CASE("an off-take pulse initially drains its pool") {
  const StateSpaceModel model = build_network(testsup::table_network());
  std::vector<double> times;
  for (int q = 0; q <= 40; ++q) times.push_back(q * 1.0);
  const Eigen::MatrixXd traj = simulate_ode_rk4(
      model, std::nullopt,
      {LoadInput{model.load_map(0), PiecewiseSignal::pulse(0, 60, 0.1)}},
      times, 5e-3);
  CHECK(traj(level_state_index(0), 5) < 9.50 - 1e-4);
  CHECK(traj(level_state_index(0), 20) < traj(level_state_index(0), 0));
}

TEST_CASE("a pool-2 request drains pool 1 through the serial coupling") {
  const StateSpaceModel model = build_network(testsup::table_network());
  std::vector<double> times;
  for (int q = 0; q <= 60; ++q) times.push_back(q * 1.0);
  const Eigen::MatrixXd traj = simulate_ode_rk4(
      model, std::nullopt,
      {LoadInput{model.load_map(3), PiecewiseSignal::pulse(0, 60, 0.05)}},
      times, 5e-3);
  // Pool 2 droops from its own off-take.
  CHECK(traj(level_state_index(1), 10) < 9.55 - 1e-4);
  // Pool 2's replenishment intake q_2 draws down pool 1.
  CHECK(traj(level_state_index(0), 40) < 9.50 - 1e-5);
}

TEST_CASE("network spec validation") {
  NetworkSpec bad = testsup::table_network();
  bad.u0[0] = 9.39;  // outside (level_lo, level_hi)
  CHECK_THROWS_AS(build_network(bad), std::invalid_argument);

  bad = testsup::table_network();
  bad.pools[1].rho = 0.0;
  CHECK_THROWS_AS(build_network(bad), std::invalid_argument);

  bad = testsup::table_network();
  bad.demand_to_pool = {0, 5};
  CHECK_THROWS_AS(build_network(bad), std::invalid_argument);
}
