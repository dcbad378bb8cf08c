#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "rigsched/problem.hpp"
#include "rigsched/solver.hpp"

namespace rigsched {

/// Parse or validation failure; the message carries the field path.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InitSpec {
  enum class Kind { zeros, separated, explicit_values };
  Kind kind = Kind::zeros;
  Schedule values;  // explicit_values only
};

/// A fully validated problem instance plus run configuration, as loaded from
/// a scenario file (strict schema, versioned).
struct Scenario {
  ScheduleProblem problem;
  double quadrature_step = 0.25;
  SolverConfig solver;
  InitSpec init;
  std::vector<std::string> state_names;  // CSV column names, one per state
  std::string system_kind;               // "two_pool" or "explicit"
};

Scenario parse_scenario(const std::string& text, const std::string& origin);
Scenario load_scenario(const std::filesystem::path& path);

/// Staircase expansion of a symmetric trapezoid profile: linear rise over
/// [start, start+ramp], hold over [start+ramp, start+ramp+plateau], mirrored
/// fall; discretized as piecewise-constant substeps of the given width with
/// midpoint values.
PiecewiseSignal staircase_trapezoid(double start, double ramp, double plateau,
                                    double amplitude, double substep);

}  // namespace rigsched
