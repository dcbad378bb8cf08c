#pragma once

#include <filesystem>
#include <string>

#include "rigsched/basis.hpp"
#include "rigsched/scenario.hpp"
#include "rigsched/solver.hpp"

namespace rigsched {

/// Shortest exact decimal representation ("%.17g"); all emitted numbers use
/// it so repeated runs produce byte-identical artifacts.
std::string format_double(double value);

void write_schedule_json(const std::filesystem::path& path,
                         const Schedule& schedule);
Schedule read_schedule_json(const std::filesystem::path& path);

void write_violation_json(const std::filesystem::path& path,
                          const ViolationReport& report);

/// Full solve report: schedule, traces, continuation history, violations.
void write_report_json(const std::filesystem::path& path,
                       const SolveReport& report, const std::string& mode);

/// Trajectory samples at the grid nodes. Columns, in order: t, one column per
/// state (scenario state names), the applied reference u_j(t) = u0_j +
/// deviation per input, and the shifted load w_i(t) per demand channel.
void write_trajectory_csv(const std::filesystem::path& path,
                          const Scenario& scenario,
                          const BasisResponses& basis,
                          const Schedule& schedule,
                          const QuadratureGrid& grid);

}  // namespace rigsched
