#include <doctest.h>

#include "rigsched/signal.hpp"

using rigsched::PiecewiseSignal;

TEST_CASE("piecewise signal validates its construction") {
  Eigen::MatrixXd one(1, 1);
  one << 1.0;
  CHECK_THROWS_AS(PiecewiseSignal({1.0}, Eigen::MatrixXd(1, 0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseSignal({1.0, 1.0}, one), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseSignal({2.0, 1.0}, one), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseSignal({0.0, 1.0}, Eigen::MatrixXd(1, 2)),
                  std::invalid_argument);
  CHECK_NOTHROW(PiecewiseSignal({0.0, 1.0}, one));
}

TEST_CASE("a breakpoint belongs to the interval it opens") {
  Eigen::MatrixXd vals(1, 2);
  vals << 2.0, 5.0;
  const PiecewiseSignal sig({0.0, 1.0, 3.0}, vals);
  CHECK(sig.value_at(-0.1)[0] == 0.0);
  CHECK(sig.value_at(0.0)[0] == 2.0);
  CHECK(sig.value_at(0.999)[0] == 2.0);
  CHECK(sig.value_at(1.0)[0] == 5.0);  // step(0) = 1
  CHECK(sig.value_at(2.5)[0] == 5.0);
  CHECK(sig.value_at(3.0)[0] == 0.0);  // finite support
  CHECK(sig.value_at(100.0)[0] == 0.0);
  CHECK(sig.shortest_segment() == 1.0);
}

TEST_CASE("scaling and shifting act on values and breakpoints") {
  const PiecewiseSignal pulse = PiecewiseSignal::pulse(1.0, 2.0, 3.0);
  CHECK(pulse.scaled(-2.0).value_at(1.5)[0] == -6.0);
  const PiecewiseSignal moved = pulse.shifted(10.0);
  CHECK(moved.support_begin() == 11.0);
  CHECK(moved.value_at(11.5)[0] == 3.0);
  CHECK(moved.value_at(1.5)[0] == 0.0);
}
