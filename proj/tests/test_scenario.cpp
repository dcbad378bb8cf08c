#include <doctest.h>

#include <filesystem>

#include "rigsched/scenario.hpp"

using namespace rigsched;

namespace {

std::filesystem::path scenario_dir() { return RIGSCHED_SCENARIO_DIR; }

std::string explicit_scenario(const std::string& demands,
                              const std::string& c_matrix = "[[1.0]]") {
  return std::string(R"({
    "schema_version": 1,
    "system": {
      "kind": "explicit",
      "A": [[-1.0]], "B": [[1.0]], "E": [[[1.0]]],
      "C": )") +
         c_matrix + R"(, "d": [1.0], "x0": [0.0], "u0": [0.0]
    },
    "horizon": 10.0,
    "sampling": 5.0,
    "u_lo": [-0.1],
    "u_hi": [0.1],
    "demands": )" +
         demands + "\n}";
}

}  // namespace

TEST_CASE("the bundled two-pool scenario loads with the documented shape") {
  const Scenario s = load_scenario(scenario_dir() / "two_pool_paper.scenario");
  CHECK(s.problem.model().nx() == 8);
  CHECK(s.problem.demand_count() == 6);
  CHECK(s.problem.model().rows() == 4);
  CHECK(s.problem.zoh_intervals() == 20);
  CHECK(s.system_kind == "two_pool");
  CHECK(s.state_names.size() == 8);
  CHECK(s.state_names[0] == "y1");
  CHECK(s.init.kind == InitSpec::Kind::separated);
  CHECK(s.solver.epsilon0 == 0.1);
}

TEST_CASE("the smoothed variant expands trapezoids into fine staircases") {
  const Scenario s =
      load_scenario(scenario_dir() / "two_pool_smoothed.scenario");
  const auto& profile = s.problem.demands()[0].profile;
  CHECK(profile.segments() > 100);
  // Total mass approximates the trapezoid area.
  double mass = 0.0;
  const auto& bps = profile.breakpoints();
  for (int seg = 0; seg < profile.segments(); ++seg) {
    mass += profile.values()(0, seg) *
            (bps[static_cast<std::size_t>(seg) + 1] -
             bps[static_cast<std::size_t>(seg)]);
  }
  // Trapezoid area: amplitude * (plateau + ramp).
  CHECK(mass == doctest::Approx(0.075 * (50.0 + 10.0)).epsilon(1e-6));
}

TEST_CASE("delay bounds are validated with the demand index in the message") {
  const std::string text = explicit_scenario(
      R"([{"profile": {"kind": "pulse", "start": 0, "duration": 1, "amplitude": 1},
           "channel": 1, "tau_lo": 5, "tau_hi": 2}])");
  CHECK_THROWS_WITH_AS(parse_scenario(text, "s"),
                       doctest::Contains("demands[0]"), ScenarioError);
}

TEST_CASE("mismatched constraint columns are a dimension error") {
  const std::string text = explicit_scenario(
      R"([{"profile": {"kind": "pulse", "start": 0, "duration": 1, "amplitude": 1},
           "channel": 1, "tau_lo": 0, "tau_hi": 2}])",
      "[[1.0, 0.0]]");
  CHECK_THROWS_AS(parse_scenario(text, "s"), ScenarioError);
}

TEST_CASE("unknown fields are rejected with their path") {
  std::string text = explicit_scenario(
      R"([{"profile": {"kind": "pulse", "start": 0, "duration": 1, "amplitude": 1},
           "channel": 1, "tau_lo": 0, "tau_hi": 2, "surprise": true}])");
  CHECK_THROWS_WITH_AS(parse_scenario(text, "s"),
                       doctest::Contains("surprise"), ScenarioError);
}

TEST_CASE("schema version is checked") {
  std::string text = explicit_scenario(
      R"([{"profile": {"kind": "pulse", "start": 0, "duration": 1, "amplitude": 1},
           "channel": 1, "tau_lo": 0, "tau_hi": 2}])");
  const auto pos = text.find("\"schema_version\": 1");
  text.replace(pos, std::string("\"schema_version\": 1").size(),
               "\"schema_version\": 7");
  CHECK_THROWS_WITH_AS(parse_scenario(text, "s"),
                       doctest::Contains("schema_version"), ScenarioError);
}

TEST_CASE("channel indices are range-checked") {
  const std::string text = explicit_scenario(
      R"([{"profile": {"kind": "pulse", "start": 0, "duration": 1, "amplitude": 1},
           "channel": 3, "tau_lo": 0, "tau_hi": 2}])");
  CHECK_THROWS_WITH_AS(parse_scenario(text, "s"), doctest::Contains("channel"),
                       ScenarioError);
}

TEST_CASE("staircase trapezoid is symmetric with midpoint plateaus") {
  const PiecewiseSignal sig = staircase_trapezoid(2.0, 1.0, 3.0, 4.0, 0.25);
  CHECK(sig.support_begin() == 2.0);
  CHECK(sig.support_end() == doctest::Approx(7.0));
  CHECK(sig.value_at(1.9)[0] == 0.0);
  CHECK(sig.value_at(2.1)[0] == doctest::Approx(4.0 * 0.125));
  CHECK(sig.value_at(4.0)[0] == 4.0);   // plateau
  CHECK(sig.value_at(6.9)[0] == doctest::Approx(4.0 * 0.125));
  CHECK(sig.value_at(7.1)[0] == 0.0);
  CHECK_THROWS_AS(staircase_trapezoid(0, -1, 1, 1, 0.1),
                  std::invalid_argument);
}

TEST_CASE("explicit init dimensions are validated") {
  std::string text = explicit_scenario(
      R"([{"profile": {"kind": "pulse", "start": 0, "duration": 1, "amplitude": 1},
           "channel": 1, "tau_lo": 0, "tau_hi": 2}])");
  text.insert(text.rfind('}'),
              R"ate(, "init": {"kind": "explicit", "tau": [0.5, 0.7], "alpha": [[0, 0]]})ate");
  CHECK_THROWS_WITH_AS(parse_scenario(text, "s"), doctest::Contains("init"),
                       ScenarioError);
}
