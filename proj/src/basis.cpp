#include "rigsched/basis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <utility>

#include "rigsched/matrix_exp.hpp"

namespace rigsched {
namespace {

// Small per-call memo: the forward walks revisit very few distinct segment
// lengths (the grid step plus a handful of splits). Deque storage keeps
// references stable across inserts.
class StepCache {
 public:
  explicit StepCache(const Eigen::MatrixXd& a) : a_(a) {}
  const TransitionPair& at(double h) {
    for (const auto& entry : entries_) {
      if (entry.first == h) return entry.second;
    }
    entries_.emplace_back(h, transition_pair(a_, h));
    return entries_.back().second;
  }

 private:
  const Eigen::MatrixXd& a_;
  std::deque<std::pair<double, TransitionPair>> entries_;
};

void check_ascending(std::span<const double> times, const char* who) {
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    if (times[i] > times[i + 1]) {
      throw std::invalid_argument(std::string(who) +
                                  ": sample times must be ascending");
    }
  }
}

}  // namespace

Eigen::VectorXd propagate_segment(const StateSpaceModel& model,
                                  const Eigen::VectorXd& x_start,
                                  const Eigen::VectorXd& u_held,
                                  const Eigen::MatrixXd& input_map, double s) {
  if (!(s >= 0.0)) {
    throw std::invalid_argument("propagate_segment: duration must be >= 0");
  }
  if (x_start.size() != model.nx() || input_map.rows() != model.nx() ||
      input_map.cols() != u_held.size()) {
    throw std::invalid_argument("propagate_segment: dimension mismatch");
  }
  const auto n = model.nx();
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + 1, n + 1);
  aug.topLeftCorner(n, n) = model.a() * s;
  aug.topRightCorner(n, 1) = input_map * u_held * s;
  const Eigen::MatrixXd e = matrix_exponential(aug);
  return e.topLeftCorner(n, n) * x_start + e.topRightCorner(n, 1);
}

Eigen::MatrixXd sample_lti_response(const Eigen::MatrixXd& a,
                                    const Eigen::MatrixXd& input_map,
                                    const PiecewiseSignal& sig,
                                    const Eigen::VectorXd& x_init,
                                    std::span<const double> times) {
  if (a.rows() != a.cols() || input_map.rows() != a.rows() ||
      input_map.cols() != sig.channels() || x_init.size() != a.rows()) {
    throw std::invalid_argument("sample_lti_response: dimension mismatch");
  }
  check_ascending(times, "sample_lti_response");

  Eigen::MatrixXd out(a.rows(), static_cast<Eigen::Index>(times.size()));
  StepCache cache(a);
  const auto& bps = sig.breakpoints();
  Eigen::VectorXd x = x_init;
  Eigen::VectorXd scratch(a.rows());
  Eigen::VectorXd drive(a.rows());
  double cur = 0.0;
  // First breakpoint strictly after the current time.
  std::size_t bp = std::upper_bound(bps.begin(), bps.end(), 0.0) - bps.begin();

  // The held forcing gamma(h) * map * value is reused until the segment
  // value or the step length changes.
  const TransitionPair* step = nullptr;
  double step_h = -1.0;
  bool drive_stale = true;

  for (std::size_t q = 0; q < times.size(); ++q) {
    const double t = times[q];
    if (t < 0.0) {
      out.col(static_cast<Eigen::Index>(q)) = x_init;
      continue;
    }
    while (cur < t) {
      double next = t;
      bool crossed = false;
      if (bp < bps.size() && bps[bp] < t) {
        next = bps[bp];
        ++bp;
        crossed = true;
      }
      const double h = next - cur;
      if (h > 0.0) {
        if (h != step_h) {
          step = &cache.at(h);
          step_h = h;
          drive_stale = true;
        }
        if (drive_stale) {
          drive.noalias() = step->gamma * (input_map * sig.value_at(cur));
          drive_stale = false;
        }
        scratch.noalias() = step->phi * x;
        scratch += drive;
        x.swap(scratch);
      }
      cur = next;
      if (crossed) drive_stale = true;
    }
    out.col(static_cast<Eigen::Index>(q)) = x;
  }
  return out;
}

BasisResponses::BasisResponses(StateSpaceModel model,
                               std::vector<LoadInput> loads, double horizon,
                               double sampling)
    : model_(std::move(model)),
      loads_(std::move(loads)),
      horizon_(horizon),
      sampling_(sampling) {
  if (!(horizon_ > 0.0)) {
    throw std::invalid_argument("BasisResponses: horizon must be > 0");
  }
  if (!(sampling_ > 0.0) || sampling_ > horizon_) {
    throw std::invalid_argument(
        "BasisResponses: sampling must satisfy 0 < sampling <= horizon");
  }
  zoh_intervals_ = static_cast<int>(std::ceil(horizon_ / sampling_));
  for (const auto& load : loads_) {
    if (load.input_map.rows() != model_.nx() ||
        load.input_map.cols() != load.profile.channels()) {
      throw std::invalid_argument("BasisResponses: load dimension mismatch");
    }
  }

  // Exact states at every profile knot; queries split the tail segment.
  load_cache_.reserve(loads_.size());
  for (const auto& load : loads_) {
    LoadCache cache;
    cache.knots.push_back(0.0);
    for (double t : load.profile.breakpoints()) {
      if (t > 0.0) cache.knots.push_back(t);
    }
    cache.states.resize(cache.knots.size());
    cache.states[0] = Eigen::VectorXd::Zero(model_.nx());
    StepCache steps(model_.a());
    for (std::size_t j = 1; j < cache.knots.size(); ++j) {
      const double h = cache.knots[j] - cache.knots[j - 1];
      const TransitionPair& tp = steps.at(h);
      cache.states[j] =
          tp.phi * cache.states[j - 1] +
          tp.gamma *
              (load.input_map * load.profile.value_at(cache.knots[j - 1]));
    }
    load_cache_.push_back(std::move(cache));
  }
}

const LoadInput& BasisResponses::load(int i) const {
  check_load(i);
  return loads_[static_cast<std::size_t>(i)];
}

void BasisResponses::check_load(int load) const {
  if (load < 0 || load >= load_count()) {
    throw std::invalid_argument("BasisResponses: load index out of range");
  }
}

Eigen::VectorXd BasisResponses::x0_at(double t) const {
  if (!(t >= 0.0)) {
    throw std::invalid_argument("BasisResponses: x0bar needs t >= 0");
  }
  return propagate_segment(model_, model_.x0(), model_.u0(), model_.b(), t);
}

Eigen::VectorXd BasisResponses::xu_at(int input, int k, double t) const {
  if (input < 0 || input >= model_.nu() || k < 0 || k >= zoh_intervals_) {
    throw std::invalid_argument("BasisResponses: ZOH pulse index out of range");
  }
  const double start = k * sampling_;
  const double end = (k + 1) * sampling_;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(model_.nx());
  if (t <= start) return x;
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
  const Eigen::MatrixXd column = model_.b().col(input);
  x = propagate_segment(model_, x, one, column, std::min(t, end) - start);
  if (t > end) {
    x = propagate_segment(model_, x, Eigen::VectorXd::Zero(1), column,
                          t - end);
  }
  return x;
}

Eigen::VectorXd BasisResponses::xv_at(int load, double s) const {
  check_load(load);
  if (s < 0.0) return Eigen::VectorXd::Zero(model_.nx());
  const LoadCache& cache = load_cache_[static_cast<std::size_t>(load)];
  const auto it =
      std::upper_bound(cache.knots.begin(), cache.knots.end(), s);
  const std::size_t j = static_cast<std::size_t>(it - cache.knots.begin()) - 1;
  const auto& li = loads_[static_cast<std::size_t>(load)];
  return propagate_segment(model_, cache.states[j],
                           li.profile.value_at(cache.knots[j]), li.input_map,
                           s - cache.knots[j]);
}

PiecewiseSignal BasisResponses::deviation_signal(
    const Eigen::MatrixXd& alpha) const {
  if (alpha.rows() != model_.nu() || alpha.cols() != zoh_intervals_) {
    throw std::invalid_argument(
        "BasisResponses: alpha must be nu x K (ZOH deviations)");
  }
  std::vector<double> bps(static_cast<std::size_t>(zoh_intervals_) + 1);
  for (int k = 0; k <= zoh_intervals_; ++k) {
    bps[static_cast<std::size_t>(k)] = k * sampling_;
  }
  return PiecewiseSignal(std::move(bps), alpha);
}

Eigen::VectorXd BasisResponses::zoh_response_at(const Eigen::MatrixXd& alpha,
                                                double t) const {
  if (model_.nu() == 0) return Eigen::VectorXd::Zero(model_.nx());
  const double times[1] = {t};
  return zoh_response_on(alpha, times).col(0);
}

Eigen::MatrixXd BasisResponses::x0_on(std::span<const double> times) const {
  if (!times.empty() && times[0] < 0.0) {
    throw std::invalid_argument("BasisResponses: x0bar needs t >= 0");
  }
  if (model_.nu() == 0) {
    return sample_lti_response(model_.a(),
                               Eigen::MatrixXd::Zero(model_.nx(), 1),
                               PiecewiseSignal::pulse(0.0, horizon_ + 1.0, 0.0),
                               model_.x0(), times);
  }
  const double pad = horizon_ + sampling_ + 1.0;
  Eigen::MatrixXd vals(model_.nu(), 1);
  vals.col(0) = model_.u0();
  return sample_lti_response(model_.a(), model_.b(),
                             PiecewiseSignal({0.0, pad}, vals), model_.x0(),
                             times);
}

Eigen::MatrixXd BasisResponses::xu_on(int input, int k,
                                      std::span<const double> times) const {
  if (input < 0 || input >= model_.nu() || k < 0 || k >= zoh_intervals_) {
    throw std::invalid_argument("BasisResponses: ZOH pulse index out of range");
  }
  return sample_lti_response(
      model_.a(), model_.b().col(input),
      PiecewiseSignal::pulse(k * sampling_, (k + 1) * sampling_, 1.0),
      Eigen::VectorXd::Zero(model_.nx()), times);
}

Eigen::MatrixXd BasisResponses::xv_on(int load, double tau,
                                      std::span<const double> times) const {
  check_load(load);
  check_ascending(times, "BasisResponses::xv_on");
  std::vector<double> shifted(times.begin(), times.end());
  for (double& t : shifted) t -= tau;
  const auto& li = loads_[static_cast<std::size_t>(load)];
  return sample_lti_response(model_.a(), li.input_map, li.profile,
                             Eigen::VectorXd::Zero(model_.nx()), shifted);
}

Eigen::MatrixXd BasisResponses::zoh_response_on(
    const Eigen::MatrixXd& alpha, std::span<const double> times) const {
  if (model_.nu() == 0) {
    return Eigen::MatrixXd::Zero(model_.nx(),
                                 static_cast<Eigen::Index>(times.size()));
  }
  return sample_lti_response(model_.a(), model_.b(), deviation_signal(alpha),
                             Eigen::VectorXd::Zero(model_.nx()), times);
}

Eigen::VectorXd BasisResponses::load_value(int load, double s) const {
  check_load(load);
  if (s < 0.0) {
    return Eigen::VectorXd::Zero(
        loads_[static_cast<std::size_t>(load)].profile.channels());
  }
  return loads_[static_cast<std::size_t>(load)].profile.value_at(s);
}

Eigen::MatrixXd BasisResponses::load_values_on(
    int load, double tau, std::span<const double> times) const {
  check_load(load);
  const auto& profile = loads_[static_cast<std::size_t>(load)].profile;
  Eigen::MatrixXd out(profile.channels(),
                      static_cast<Eigen::Index>(times.size()));
  for (std::size_t q = 0; q < times.size(); ++q) {
    const double s = times[q] - tau;
    out.col(static_cast<Eigen::Index>(q)) =
        s < 0.0 ? Eigen::VectorXd::Zero(profile.channels()).eval()
                : profile.value_at(s);
  }
  return out;
}

BasisResponses build_basis(StateSpaceModel model, std::vector<LoadInput> loads,
                           double horizon, double sampling) {
  return BasisResponses(std::move(model), std::move(loads), horizon, sampling);
}

}  // namespace rigsched
