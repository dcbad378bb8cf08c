#include "rigsched/ode_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rigsched {

Eigen::MatrixXd simulate_ode_rk4(const StateSpaceModel& model,
                                 const std::optional<PiecewiseSignal>& u_total,
                                 const std::vector<LoadInput>& loads,
                                 std::span<const double> sample_times,
                                 double step) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("simulate_ode_rk4: step must be > 0");
  }
  for (const auto& load : loads) {
    if (load.input_map.rows() != model.nx() ||
        load.input_map.cols() != load.profile.channels()) {
      throw std::invalid_argument("simulate_ode_rk4: load dimensions mismatch");
    }
  }
  if (u_total && u_total->channels() != model.nu()) {
    throw std::invalid_argument("simulate_ode_rk4: control channel mismatch");
  }

  // Event times: integration restarts at each so held inputs stay constant
  // within every RK4 step.
  std::vector<double> events(sample_times.begin(), sample_times.end());
  events.push_back(0.0);
  if (u_total) {
    for (double t : u_total->breakpoints()) events.push_back(t);
  }
  for (const auto& load : loads) {
    for (double t : load.profile.breakpoints()) events.push_back(t);
  }
  const double t_end =
      sample_times.empty() ? 0.0 : sample_times[sample_times.size() - 1];
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());
  // Keep only [0, t_end].
  std::erase_if(events, [&](double t) { return t < 0.0 || t > t_end; });

  for (std::size_t i = 0; i + 1 < sample_times.size(); ++i) {
    if (sample_times[i] > sample_times[i + 1]) {
      throw std::invalid_argument("simulate_ode_rk4: times must be ascending");
    }
  }
  if (!sample_times.empty() && sample_times[0] < 0.0) {
    throw std::invalid_argument("simulate_ode_rk4: times must be >= 0");
  }

  const auto held_forcing = [&](double t_mid) {
    Eigen::VectorXd c = u_total ? (model.b() * u_total->value_at(t_mid)).eval()
                                : (model.b() * model.u0()).eval();
    for (const auto& load : loads) {
      c += load.input_map * load.profile.value_at(t_mid);
    }
    return c;
  };

  Eigen::MatrixXd out(model.nx(), static_cast<Eigen::Index>(sample_times.size()));
  Eigen::VectorXd x = model.x0();
  double t_cur = 0.0;
  std::size_t next_sample = 0;

  const auto record_samples_at = [&](double t) {
    while (next_sample < sample_times.size() && sample_times[next_sample] <= t) {
      out.col(static_cast<Eigen::Index>(next_sample)) = x;
      ++next_sample;
    }
  };
  record_samples_at(0.0);

  const Eigen::MatrixXd& a = model.a();
  for (std::size_t ev = 0; ev + 1 < events.size(); ++ev) {
    const double seg_begin = events[ev];
    const double seg_end = events[ev + 1];
    const double seg_len = seg_end - seg_begin;
    if (seg_len <= 0.0) continue;
    const Eigen::VectorXd c = held_forcing(seg_begin + 0.5 * seg_len);
    const auto substeps =
        std::max<long>(1, static_cast<long>(std::ceil(seg_len / step)));
    const double h = seg_len / static_cast<double>(substeps);
    for (long s = 0; s < substeps; ++s) {
      const Eigen::VectorXd k1 = a * x + c;
      const Eigen::VectorXd k2 = a * (x + 0.5 * h * k1) + c;
      const Eigen::VectorXd k3 = a * (x + 0.5 * h * k2) + c;
      const Eigen::VectorXd k4 = a * (x + h * k3) + c;
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    t_cur = seg_end;
    record_samples_at(t_cur);
  }
  record_samples_at(t_end + 1.0);  // flush duplicates of the final time
  return out;
}

}  // namespace rigsched
