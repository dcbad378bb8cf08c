#include "rigsched/io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace rigsched {

using nlohmann::ordered_json;

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

namespace {

ordered_json schedule_to_json(const Schedule& schedule) {
  ordered_json j;
  j["schema_version"] = 1;
  j["tau"] = std::vector<double>(schedule.tau.data(),
                                 schedule.tau.data() + schedule.tau.size());
  ordered_json alpha = ordered_json::array();
  for (Eigen::Index r = 0; r < schedule.alpha.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index c = 0; c < schedule.alpha.cols(); ++c) {
      row.push_back(schedule.alpha(r, c));
    }
    alpha.push_back(std::move(row));
  }
  j["alpha"] = std::move(alpha);
  return j;
}

ordered_json violations_to_json(const ViolationReport& report) {
  ordered_json j;
  j["feasible"] = report.feasible;
  j["tolerance"] = report.tolerance;
  j["max_violation"] = report.overall_max;
  ordered_json rows = ordered_json::array();
  for (const auto& row : report.rows) {
    ordered_json r;
    r["max_violation"] = row.max_violation;
    r["argmax_time"] = row.argmax_time;
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  out << text;
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

}  // namespace

void write_schedule_json(const std::filesystem::path& path,
                         const Schedule& schedule) {
  write_text(path, schedule_to_json(schedule).dump(2) + "\n");
}

Schedule read_schedule_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open schedule file: " + path.string());
  }
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("tau") || !j.contains("alpha")) {
    throw std::runtime_error(path.string() +
                             ": schedule needs 'tau' and 'alpha'");
  }
  Schedule s;
  const auto& jt = j.at("tau");
  s.tau.resize(static_cast<Eigen::Index>(jt.size()));
  for (std::size_t i = 0; i < jt.size(); ++i) {
    s.tau[static_cast<Eigen::Index>(i)] = jt[i].get<double>();
  }
  const auto& ja = j.at("alpha");
  const std::size_t rows = ja.size();
  const std::size_t cols = rows == 0 ? 0 : ja[0].size();
  s.alpha.resize(static_cast<Eigen::Index>(rows),
                 static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (ja[r].size() != cols) {
      throw std::runtime_error(path.string() + ": ragged alpha matrix");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      s.alpha(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          ja[r][c].get<double>();
    }
  }
  return s;
}

void write_violation_json(const std::filesystem::path& path,
                          const ViolationReport& report) {
  write_text(path, violations_to_json(report).dump(2) + "\n");
}

void write_report_json(const std::filesystem::path& path,
                       const SolveReport& report, const std::string& mode) {
  ordered_json j;
  j["schema_version"] = 1;
  j["mode"] = mode;
  j["schedule"] = schedule_to_json(report.schedule);
  j["per_demand_delay"] = std::vector<double>(
      report.per_demand_delay.data(),
      report.per_demand_delay.data() + report.per_demand_delay.size());
  j["iterations"] = report.iterations;
  switch (report.termination) {
    case Termination::converged:
      j["termination"] = "converged";
      break;
    case Termination::stalled:
      j["termination"] = "stalled";
      break;
    case Termination::iteration_limit:
      j["termination"] = "iteration_limit";
      break;
  }
  ordered_json rounds = ordered_json::array();
  for (const auto& record : report.continuation_history) {
    ordered_json r;
    r["parameter"] = record.parameter;
    r["final_cost"] = record.final_cost;
    r["max_violation"] = record.max_violation;
    r["iterations"] = record.iterations;
    rounds.push_back(std::move(r));
  }
  j["continuation"] = std::move(rounds);
  j["violations"] = violations_to_json(report.violations);
  j["cost_trace"] = report.cost_trace;
  j["grad_norm_trace"] = report.grad_norm_trace;
  write_text(path, j.dump(2) + "\n");
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const Scenario& scenario,
                          const BasisResponses& basis,
                          const Schedule& schedule,
                          const QuadratureGrid& grid) {
  const auto& problem = scenario.problem;
  const auto& model = problem.model();
  const Eigen::MatrixXd x = trajectory_on(basis, schedule, grid.nodes());

  std::vector<Eigen::MatrixXd> loads;
  for (int i = 0; i < basis.load_count(); ++i) {
    loads.push_back(basis.load_values_on(i, schedule.tau[i], grid.nodes()));
  }

  std::string text;
  text += "t";
  for (const auto& name : scenario.state_names) {
    text += "," + name;
  }
  for (int jn = 1; jn <= model.nu(); ++jn) {
    text += ",u" + std::to_string(jn);
  }
  for (int i = 0; i < basis.load_count(); ++i) {
    const int channels = static_cast<int>(loads[static_cast<std::size_t>(i)].rows());
    for (int c = 1; c <= channels; ++c) {
      text += ",w" + std::to_string(i + 1);
      if (channels > 1) text += "_" + std::to_string(c);
    }
  }
  text += "\n";

  const double sampling = problem.sampling();
  const int zoh = problem.zoh_intervals();
  for (std::size_t q = 0; q < grid.size(); ++q) {
    const double t = grid.nodes()[q];
    text += format_double(t);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      text += "," + format_double(x(r, static_cast<Eigen::Index>(q)));
    }
    // Applied reference: u0 plus the active ZOH deviation (none at t = K*dt,
    // consistent with the pulse family being zero there).
    const int k = std::min(zoh - 1, static_cast<int>(t / sampling));
    for (int jn = 0; jn < model.nu(); ++jn) {
      const bool active = t < zoh * sampling;
      const double u = model.u0()[jn] + (active ? schedule.alpha(jn, k) : 0.0);
      text += "," + format_double(u);
    }
    for (int i = 0; i < basis.load_count(); ++i) {
      const auto& w = loads[static_cast<std::size_t>(i)];
      for (Eigen::Index c = 0; c < w.rows(); ++c) {
        text += "," + format_double(w(c, static_cast<Eigen::Index>(q)));
      }
    }
    text += "\n";
  }
  write_text(path, text);
}

}  // namespace rigsched
