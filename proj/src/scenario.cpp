#include "rigsched/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rigsched/irrigation.hpp"

namespace rigsched {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ScenarioError(path + ": " + what);
}

/// Strict-object reader: every field must be consumed or finish() rejects it.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  const json& require(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) fail(path_, "missing field '" + key + "'");
    return j_.at(key);
  }
  const json* optional(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }
  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) {
        fail(path_, "unknown field '" + item.key() + "'");
      }
    }
  }
  const std::string& path() const { return path_; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

Eigen::VectorXd as_vector(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] =
        as_number(j[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

Eigen::MatrixXd as_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected an array of rows");
  // A flat numeric array is accepted as a single column.
  if (j[0].is_number()) {
    const Eigen::VectorXd col = as_vector(j, path);
    return col;
  }
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string rpath = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols) {
      fail(rpath, "expected a row of " + std::to_string(cols) + " numbers");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          as_number(j[r][c], rpath + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

PiecewiseSignal parse_profile(const json& j, const std::string& path) {
  Obj obj(j, path);
  const std::string kind = as_string(obj.require("kind"), path + ".kind");
  if (kind == "pulse") {
    const double start = as_number(obj.require("start"), path + ".start");
    const double duration =
        as_number(obj.require("duration"), path + ".duration");
    const double amplitude =
        as_number(obj.require("amplitude"), path + ".amplitude");
    obj.finish();
    if (!(duration > 0.0)) fail(path + ".duration", "must be > 0");
    return PiecewiseSignal::pulse(start, start + duration, amplitude);
  }
  if (kind == "trapezoid") {
    const double start = as_number(obj.require("start"), path + ".start");
    const double ramp = as_number(obj.require("ramp"), path + ".ramp");
    const double plateau =
        as_number(obj.require("plateau"), path + ".plateau");
    const double amplitude =
        as_number(obj.require("amplitude"), path + ".amplitude");
    const double substep =
        as_number(obj.require("substep"), path + ".substep");
    obj.finish();
    try {
      return staircase_trapezoid(start, ramp, plateau, amplitude, substep);
    } catch (const std::invalid_argument& e) {
      fail(path, e.what());
    }
  }
  if (kind == "explicit") {
    const json& jb = obj.require("breakpoints");
    const json& jv = obj.require("values");
    obj.finish();
    const Eigen::VectorXd b = as_vector(jb, path + ".breakpoints");
    if (!jv.is_array() || jv.empty()) {
      fail(path + ".values", "expected one value array per segment");
    }
    // values[j] is the (possibly multi-channel) value on segment j.
    std::size_t channels = jv[0].is_array() ? jv[0].size() : 1;
    Eigen::MatrixXd vals(channels, jv.size());
    for (std::size_t s = 0; s < jv.size(); ++s) {
      const std::string vpath = path + ".values[" + std::to_string(s) + "]";
      if (jv[s].is_number()) {
        if (channels != 1) fail(vpath, "channel count mismatch");
        vals(0, static_cast<Eigen::Index>(s)) = as_number(jv[s], vpath);
      } else if (jv[s].is_array() && jv[s].size() == channels) {
        for (std::size_t c = 0; c < channels; ++c) {
          vals(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(s)) =
              as_number(jv[s][c], vpath + "[" + std::to_string(c) + "]");
        }
      } else {
        fail(vpath, "channel count mismatch");
      }
    }
    try {
      return PiecewiseSignal(
          std::vector<double>(b.data(), b.data() + b.size()), vals);
    } catch (const std::invalid_argument& e) {
      fail(path, e.what());
    }
  }
  fail(path + ".kind", "unknown profile kind '" + kind + "'");
}

PenaltySpec parse_penalty(const json* j, const std::string& path) {
  PenaltySpec spec;
  if (!j) return spec;  // default: linear, weight 1
  Obj obj(*j, path);
  const std::string kind = as_string(obj.require("kind"), path + ".kind");
  if (kind == "linear") {
    spec.kind = PenaltySpec::Kind::linear;
  } else if (kind == "weighted_linear") {
    spec.kind = PenaltySpec::Kind::weighted_linear;
  } else if (kind == "quadratic") {
    spec.kind = PenaltySpec::Kind::quadratic;
  } else {
    fail(path + ".kind", "unknown penalty kind '" + kind + "'");
  }
  if (const json* w = obj.optional("weight")) {
    spec.weight = as_number(*w, path + ".weight");
  }
  if (spec.kind == PenaltySpec::Kind::weighted_linear && !j->contains("weight")) {
    fail(path, "weighted_linear requires a weight");
  }
  if (const json* r = obj.optional("reference")) {
    if (spec.kind != PenaltySpec::Kind::quadratic) {
      fail(path + ".reference", "only quadratic penalties take a reference");
    }
    spec.reference = as_number(*r, path + ".reference");
  }
  obj.finish();
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  return spec;
}

SolverConfig parse_solver(const json* j, const std::string& path) {
  SolverConfig cfg;
  if (!j) return cfg;
  Obj obj(*j, path);
  if (const json* v = obj.optional("mode")) {
    const std::string mode = as_string(*v, path + ".mode");
    if (mode == "barrier") {
      cfg.mode = SolveMode::barrier;
    } else if (mode == "penalty") {
      cfg.mode = SolveMode::penalty;
    } else {
      fail(path + ".mode", "expected 'barrier' or 'penalty'");
    }
  }
  const auto num = [&](const char* key, double* out) {
    if (const json* v = obj.optional(key)) {
      *out = as_number(*v, path + "." + key);
    }
  };
  num("epsilon0", &cfg.epsilon0);
  num("vartheta0", &cfg.vartheta0);
  num("continuation_factor", &cfg.continuation_factor);
  num("ls_alpha", &cfg.ls_alpha);
  num("ls_beta", &cfg.ls_beta);
  num("step0", &cfg.step0);
  num("tol_rel", &cfg.tol_rel);
  num("violation_tol", &cfg.violation_tol);
  if (const json* v = obj.optional("continuation_rounds")) {
    cfg.continuation_rounds = as_int(*v, path + ".continuation_rounds");
  }
  if (const json* v = obj.optional("max_iter")) {
    cfg.max_iter = as_int(*v, path + ".max_iter");
  }
  obj.finish();
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  return cfg;
}

struct ParsedSystem {
  StateSpaceModel model;
  std::vector<std::string> state_names;
  std::string kind;
  bool demand_by_pool = false;  // demands name a pool, channels are built here
  std::vector<PoolParams> pools;
  Eigen::VectorXd pool_u0, level_lo, level_hi;
};

ParsedSystem parse_two_pool(Obj& obj, const std::string& path,
                            const json& demands_json,
                            const std::string& demands_path) {
  NetworkSpec spec;
  const json& jp = obj.require("pools");
  if (!jp.is_array() || jp.empty()) fail(path + ".pools", "expected pools");
  for (std::size_t i = 0; i < jp.size(); ++i) {
    const std::string ppath = path + ".pools[" + std::to_string(i) + "]";
    Obj pool(jp[i], ppath);
    PoolParams params;
    params.c_in = as_number(pool.require("c_in"), ppath + ".c_in");
    params.c_out = as_number(pool.require("c_out"), ppath + ".c_out");
    params.t_d = as_number(pool.require("t_d"), ppath + ".t_d");
    params.kappa = as_number(pool.require("kappa"), ppath + ".kappa");
    params.phi = as_number(pool.require("phi"), ppath + ".phi");
    params.rho = as_number(pool.require("rho"), ppath + ".rho");
    pool.finish();
    spec.pools.push_back(params);
  }
  spec.u0 = as_vector(obj.require("u0"), path + ".u0");
  spec.level_lo = as_vector(obj.require("level_lo"), path + ".level_lo");
  spec.level_hi = as_vector(obj.require("level_hi"), path + ".level_hi");
  obj.finish();

  // Demand-to-pool map comes from the demand entries (1-based "pool").
  if (!demands_json.is_array() || demands_json.empty()) {
    fail(demands_path, "expected at least one demand");
  }
  for (std::size_t i = 0; i < demands_json.size(); ++i) {
    const std::string dpath = demands_path + "[" + std::to_string(i) + "]";
    if (!demands_json[i].is_object() || !demands_json[i].contains("pool")) {
      fail(dpath, "two_pool demands need a 'pool' field");
    }
    const int pool = as_int(demands_json[i].at("pool"), dpath + ".pool");
    if (pool < 1 || pool > static_cast<int>(spec.pools.size())) {
      fail(dpath + ".pool", "pool index out of range");
    }
    spec.demand_to_pool.push_back(pool - 1);
  }

  StateSpaceModel model = [&] {
    try {
      return build_network(spec);
    } catch (const std::exception& e) {
      fail(path, e.what());
    }
  }();

  std::vector<std::string> names;
  for (std::size_t i = 1; i <= spec.pools.size(); ++i) {
    const std::string n = std::to_string(i);
    names.push_back("y" + n);
    names.push_back("pade" + n);
    names.push_back("ctl_i" + n);
    names.push_back("ctl_l" + n);
  }
  ParsedSystem out{std::move(model), std::move(names), "two_pool", true,
                   std::move(spec.pools), spec.u0, spec.level_lo,
                   spec.level_hi};
  return out;
}

ParsedSystem parse_explicit(Obj& obj, const std::string& path) {
  const Eigen::MatrixXd a = as_matrix(obj.require("A"), path + ".A");
  const Eigen::MatrixXd b = as_matrix(obj.require("B"), path + ".B");
  const json& je = obj.require("E");
  if (!je.is_array() || je.empty()) {
    fail(path + ".E", "expected an array of load maps");
  }
  std::vector<Eigen::MatrixXd> e;
  for (std::size_t i = 0; i < je.size(); ++i) {
    e.push_back(as_matrix(je[i], path + ".E[" + std::to_string(i) + "]"));
  }
  const Eigen::MatrixXd c = as_matrix(obj.require("C"), path + ".C");
  const Eigen::VectorXd d = as_vector(obj.require("d"), path + ".d");
  const Eigen::VectorXd x0 = as_vector(obj.require("x0"), path + ".x0");
  const Eigen::VectorXd u0 = as_vector(obj.require("u0"), path + ".u0");
  obj.finish();

  StateSpaceModel model = [&] {
    try {
      return StateSpaceModel(a, b, e, c, d, x0, u0);
    } catch (const std::exception& err) {
      fail(path, err.what());
    }
  }();
  std::vector<std::string> names;
  for (int i = 1; i <= model.nx(); ++i) {
    names.push_back("x" + std::to_string(i));
  }
  return ParsedSystem{std::move(model), std::move(names), "explicit", false,
                      {}, {}, {}, {}};
}

}  // namespace

PiecewiseSignal staircase_trapezoid(double start, double ramp, double plateau,
                                    double amplitude, double substep) {
  if (!(ramp > 0.0) || !(plateau >= 0.0) || !(substep > 0.0)) {
    throw std::invalid_argument(
        "staircase_trapezoid: need ramp > 0, plateau >= 0, substep > 0");
  }
  const int n = std::max(1, static_cast<int>(std::llround(ramp / substep)));
  std::vector<double> bps;
  std::vector<double> vals;
  // Rising staircase with midpoint values.
  for (int i = 0; i < n; ++i) {
    bps.push_back(start + ramp * i / n);
    vals.push_back(amplitude * (i + 0.5) / n);
  }
  bps.push_back(start + ramp);
  vals.push_back(amplitude);
  if (plateau > 0.0) {
    bps.push_back(start + ramp + plateau);
  } else {
    bps.back() = start + ramp;  // plateau collapses; fall starts immediately
    vals.pop_back();
  }
  const double fall_begin = bps.back();
  for (int i = 0; i < n; ++i) {
    if (i > 0) bps.push_back(fall_begin + ramp * i / n);
    vals.push_back(amplitude * (n - i - 0.5) / n);
  }
  bps.push_back(fall_begin + ramp);

  Eigen::MatrixXd m(1, static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) {
    m(0, static_cast<Eigen::Index>(i)) = vals[i];
  }
  return PiecewiseSignal(std::move(bps), m);
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(origin + ": " + e.what());
  }
  Obj top(root, origin);

  const int version =
      as_int(top.require("schema_version"), origin + ".schema_version");
  if (version != 1) {
    fail(origin + ".schema_version", "unsupported schema version " +
                                         std::to_string(version));
  }

  const json& jsys = top.require("system");
  Obj sys(jsys, origin + ".system");
  const std::string kind =
      as_string(sys.require("kind"), origin + ".system.kind");

  const json& jdemands = top.require("demands");
  const std::string demands_path = origin + ".demands";

  ParsedSystem parsed = [&] {
    if (kind == "two_pool") {
      return parse_two_pool(sys, origin + ".system", jdemands, demands_path);
    }
    if (kind == "explicit") {
      return parse_explicit(sys, origin + ".system");
    }
    fail(origin + ".system.kind", "unknown system kind '" + kind + "'");
  }();

  const double horizon = as_number(top.require("horizon"), origin + ".horizon");
  const double sampling =
      as_number(top.require("sampling"), origin + ".sampling");

  double quadrature_step = 0.25;
  if (const json* v = top.optional("quadrature_step")) {
    quadrature_step = as_number(*v, origin + ".quadrature_step");
    if (!(quadrature_step > 0.0)) {
      fail(origin + ".quadrature_step", "must be > 0");
    }
  }

  const Eigen::VectorXd u_lo = as_vector(top.require("u_lo"), origin + ".u_lo");
  const Eigen::VectorXd u_hi = as_vector(top.require("u_hi"), origin + ".u_hi");

  if (!jdemands.is_array() || jdemands.empty()) {
    fail(demands_path, "expected at least one demand");
  }
  std::vector<DemandRequest> demands;
  for (std::size_t i = 0; i < jdemands.size(); ++i) {
    const std::string dpath = demands_path + "[" + std::to_string(i) + "]";
    Obj dem(jdemands[i], dpath);
    DemandRequest request{parse_profile(dem.require("profile"),
                                        dpath + ".profile"),
                          0.0, 0.0, PenaltySpec{}, 0};
    request.tau_lo = as_number(dem.require("tau_lo"), dpath + ".tau_lo");
    request.tau_hi = as_number(dem.require("tau_hi"), dpath + ".tau_hi");
    if (!(request.tau_lo <= request.tau_hi)) {
      fail(dpath, "tau_lo exceeds tau_hi");
    }
    request.penalty = parse_penalty(dem.optional("penalty"), dpath + ".penalty");
    if (parsed.demand_by_pool) {
      dem.require("pool");  // consumed above for the channel map
      request.target_channel = static_cast<int>(i);
    } else {
      const int channel = as_int(dem.require("channel"), dpath + ".channel");
      if (channel < 1 || channel > parsed.model.channels()) {
        fail(dpath + ".channel", "channel index out of range");
      }
      request.target_channel = channel - 1;
    }
    dem.finish();
    demands.push_back(std::move(request));
  }

  SolverConfig solver = parse_solver(top.optional("solver"), origin + ".solver");

  InitSpec init;
  if (const json* jinit = top.optional("init")) {
    Obj in(*jinit, origin + ".init");
    const std::string ikind = as_string(in.require("kind"), origin + ".init.kind");
    if (ikind == "zeros") {
      init.kind = InitSpec::Kind::zeros;
    } else if (ikind == "separated") {
      init.kind = InitSpec::Kind::separated;
    } else if (ikind == "explicit") {
      init.kind = InitSpec::Kind::explicit_values;
      init.values.tau = as_vector(in.require("tau"), origin + ".init.tau");
      init.values.alpha =
          as_matrix(in.require("alpha"), origin + ".init.alpha");
    } else {
      fail(origin + ".init.kind", "expected zeros, separated or explicit");
    }
    in.finish();
  }

  top.finish();

  ScheduleProblem problem = [&] {
    try {
      return ScheduleProblem(std::move(parsed.model), std::move(demands),
                             horizon, sampling, u_lo, u_hi);
    } catch (const std::exception& e) {
      fail(origin, e.what());
    }
  }();

  if (init.kind == InitSpec::Kind::explicit_values) {
    if (init.values.tau.size() != problem.demand_count() ||
        init.values.alpha.rows() != problem.model().nu() ||
        init.values.alpha.cols() != problem.zoh_intervals()) {
      fail(origin + ".init", "explicit init has wrong dimensions");
    }
  }

  return Scenario{std::move(problem), quadrature_step, solver, std::move(init),
                  std::move(parsed.state_names), parsed.kind};
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ScenarioError("cannot open scenario file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path.filename().string());
}

}  // namespace rigsched
