#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "hfo/errors.hpp"
#include "hfo/experiments.hpp"
#include "hfo/io.hpp"

namespace hfo {

namespace {

double as_double(const YAML::Node& n, const std::string& key) {
  try {
    return n.as<double>();
  } catch (const YAML::Exception&) {
    throw ConfigError("key '" + key + "' expects a number");
  }
}

std::vector<double> as_list(const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence()) throw ConfigError("key '" + key + "' expects a bracketed list");
  std::vector<double> v;
  for (const auto& item : n) v.push_back(as_double(item, key));
  return v;
}

template <int N>
Eigen::Matrix<double, N, 1> as_vec(const YAML::Node& n, const std::string& key) {
  const auto v = as_list(n, key);
  if (static_cast<int>(v.size()) != N) {
    throw ConfigError("key '" + key + "' expects " + std::to_string(N) + " values");
  }
  return Eigen::Map<const Eigen::Matrix<double, N, 1>>(v.data());
}

// A list of N values is a diagonal, N * N values a row-major matrix.
template <int N>
Eigen::Matrix<double, N, N> as_weight(const YAML::Node& n, const std::string& key) {
  const auto v = as_list(n, key);
  if (static_cast<int>(v.size()) == N) {
    return Eigen::Map<const Eigen::Matrix<double, N, 1>>(v.data()).asDiagonal();
  }
  if (static_cast<int>(v.size()) == N * N) {
    return Eigen::Map<const Eigen::Matrix<double, N, N, Eigen::RowMajor>>(v.data());
  }
  throw ConfigError("key '" + key + "' expects " + std::to_string(N) + " or " +
                    std::to_string(N * N) + " values");
}

std::string as_string(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) throw ConfigError("key '" + key + "' expects a string");
  return n.as<std::string>();
}

bool as_bool(const YAML::Node& n, const std::string& key) {
  try {
    return n.as<bool>();
  } catch (const YAML::Exception&) {
    throw ConfigError("key '" + key + "' expects true or false");
  }
}

std::uint64_t as_seed(const YAML::Node& n, const std::string& key) {
  try {
    return n.as<std::uint64_t>();
  } catch (const YAML::Exception&) {
    throw ConfigError("key '" + key + "' expects a non-negative integer");
  }
}

InitErrMode parse_init_err_mode(const std::string& s) {
  if (s == "per-sample") return InitErrMode::PerSample;
  if (s == "frozen") return InitErrMode::Frozen;
  throw ConfigError("unknown init_err_mode '" + s + "'");
}

using Setter = std::function<void(ExperimentConfig&, const YAML::Node&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  using C = ExperimentConfig;
  using N = YAML::Node;
  using S = std::string;
  static const std::map<std::string, Setter> table = {
      {"mu", [](C& c, const N& n, const S& k) { c.orbit.mu = as_double(n, k); }},
      {"a", [](C& c, const N& n, const S& k) { c.orbit.a = as_double(n, k); }},
      {"m_c", [](C& c, const N& n, const S& k) { c.orbit.m_c = as_double(n, k); }},
      {"eigenvalues",
       [](C& c, const N& n, const S& k) {
         const Vec6 v = as_vec<6>(n, k);
         for (int i = 0; i < 6; ++i) c.eigenvalues[i] = v(i);
       }},
      {"q_u", [](C& c, const N& n, const S& k) { c.objective.Q_u = as_weight<3>(n, k); }},
      {"q_y", [](C& c, const N& n, const S& k) { c.objective.Q_y = as_weight<6>(n, k); }},
      {"y_hat", [](C& c, const N& n, const S& k) { c.objective.y_hat = as_vec<6>(n, k); }},
      {"u_lo", [](C& c, const N& n, const S& k) { c.objective.box.lo = as_vec<3>(n, k); }},
      {"u_hi", [](C& c, const N& n, const S& k) { c.objective.box.hi = as_vec<3>(n, k); }},
      {"gamma", [](C& c, const N& n, const S& k) { c.objective.gamma = as_double(n, k); }},
      {"strict_stepsize",
       [](C& c, const N& n, const S& k) { c.strict_stepsize = as_bool(n, k); }},
      {"tau_c_min", [](C& c, const N& n, const S& k) { c.timers.tau_c_min = as_double(n, k); }},
      {"tau_c_max", [](C& c, const N& n, const S& k) { c.timers.tau_c_max = as_double(n, k); }},
      {"tau_g_comp",
       [](C& c, const N& n, const S& k) { c.timers.tau_g_comp = as_double(n, k); }},
      {"reset_policy",
       [](C& c, const N& n, const S& k) {
         c.timers.reset_policy = parse_reset_policy(as_string(n, k));
       }},
      {"case3_order",
       [](C& c, const N& n, const S& k) {
         c.timers.case3_order = parse_case3_order(as_string(n, k));
       }},
      {"seed", [](C& c, const N& n, const S& k) { c.timers.seed = as_seed(n, k); }},
      {"theta_g_comp", [](C& c, const N& n, const S& k) { c.rho.theta_g_comp = as_double(n, k); }},
      {"theta_c_min", [](C& c, const N& n, const S& k) { c.rho.theta_c_min = as_double(n, k); }},
      {"theta_c_max", [](C& c, const N& n, const S& k) { c.rho.theta_c_max = as_double(n, k); }},
      {"kappa_c", [](C& c, const N& n, const S& k) { c.rho.kappa_c = as_double(n, k); }},
      {"kappa_g", [](C& c, const N& n, const S& k) { c.rho.kappa_g = as_double(n, k); }},
      {"disturbance",
       [](C& c, const N& n, const S& k) { c.disturbance.kind = as_string(n, k); }},
      {"disturbance_amplitude",
       [](C& c, const N& n, const S& k) { c.disturbance.amplitude = as_double(n, k); }},
      {"disturbance_omega",
       [](C& c, const N& n, const S& k) { c.disturbance.omega = as_double(n, k); }},
      {"sample_true_output",
       [](C& c, const N& n, const S& k) { c.sim.sample_true_output = as_bool(n, k); }},
      {"substep", [](C& c, const N& n, const S& k) { c.sim.substep = as_double(n, k); }},
      {"zeno_factor", [](C& c, const N& n, const S& k) { c.sim.zeno_factor = as_double(n, k); }},
      {"event_tol", [](C& c, const N& n, const S& k) { c.sim.event_tol = as_double(n, k); }},
      {"x0", [](C& c, const N& n, const S& k) { c.init.x = as_vec<6>(n, k); }},
      {"u0", [](C& c, const N& n, const S& k) { c.init.u = as_vec<3>(n, k); }},
      {"ys0", [](C& c, const N& n, const S& k) { c.init.y_s = as_vec<6>(n, k); }},
      {"z0", [](C& c, const N& n, const S& k) { c.init.z = as_vec<3>(n, k); }},
      {"tau_c0", [](C& c, const N& n, const S& k) { c.init.tau_c = as_double(n, k); }},
      {"tau_g0", [](C& c, const N& n, const S& k) { c.init.tau_g = as_double(n, k); }},
      {"tau_d0", [](C& c, const N& n, const S& k) { c.init.tau_d = as_double(n, k); }},
      {"horizon", [](C& c, const N& n, const S& k) { c.horizon = as_double(n, k); }},
      {"sample_dt", [](C& c, const N& n, const S& k) { c.sample_dt = as_double(n, k); }},
      {"window", [](C& c, const N& n, const S& k) { c.window = as_double(n, k); }},
      {"solver_tol", [](C& c, const N& n, const S& k) { c.solver_tol = as_double(n, k); }},
      {"init_err_mode",
       [](C& c, const N& n, const S& k) {
         c.init_err_mode = parse_init_err_mode(as_string(n, k));
       }},
      {"sweep_theta", [](C& c, const N& n, const S& k) { c.sweep.thetas = as_list(n, k); }},
      {"sweep_kappa", [](C& c, const N& n, const S& k) { c.sweep.kappas = as_list(n, k); }},
      {"sweep_reset_policy",
       [](C& c, const N& n, const S& k) {
         c.sweep.reset_policy = parse_reset_policy(as_string(n, k));
       }},
      {"batch_n",
       [](C& c, const N& n, const S& k) { c.batch.n = static_cast<int>(as_double(n, k)); }},
      {"batch_seed", [](C& c, const N& n, const S& k) { c.batch.seed = as_seed(n, k); }},
      {"batch_x_lo", [](C& c, const N& n, const S& k) { c.batch.x_lo = as_vec<6>(n, k); }},
      {"batch_x_hi", [](C& c, const N& n, const S& k) { c.batch.x_hi = as_vec<6>(n, k); }},
      {"batch_ys_offset",
       [](C& c, const N& n, const S& k) { c.batch.ys_offset = as_double(n, k); }},
      {"out_dir", [](C& c, const N& n, const S& k) { c.out_dir = as_string(n, k); }},
  };
  return table;
}

template <typename Derived>
std::string list(const Eigen::MatrixBase<Derived>& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_double(v(i));
  }
  return s + "]";
}

std::string list(const std::vector<double>& v) {
  return list(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
}

template <int N>
std::string weight(const Eigen::Matrix<double, N, N>& m) {
  if (m.isDiagonal(0.0)) return list(Eigen::Matrix<double, N, 1>(m.diagonal()));
  const Eigen::Matrix<double, N, N, Eigen::RowMajor> r = m;
  return list(Eigen::Map<const Eigen::Matrix<double, N * N, 1>>(r.data()));
}

}  // namespace

DisturbancePtr DisturbanceSpec::make() const {
  if (kind == "zero") return make_zero_disturbance();
  if (kind == "constant") return make_constant_disturbance(amplitude);
  if (kind == "sine") return make_sine_disturbance(amplitude, omega);
  throw ConfigError("unknown disturbance kind '" + kind + "'");
}

QuadObjective ExperimentConfig::default_objective() {
  QuadObjective obj;
  obj.Q_u = 5e-5 * Mat3::Identity();
  obj.Q_y = Vec6(0.04, 0.04, 0.04, 0.055, 0.055, 0.055).asDiagonal();
  obj.y_hat << 100, 100, 100, 0, 0, 0;
  obj.box = InputBox::symmetric(0.4);
  obj.gamma = 0.1;
  return obj;
}

HybridState ExperimentConfig::default_initial_state() {
  HybridState s;
  s.x << 1500, -1770, 3000, 1, 3.4, 1;
  s.y_s << 1505, -1775, 3005, 6, 5.4, 6.2;
  s.tau_c = 0.175;
  s.tau_g = 0.5;
  return s;
}

void ExperimentConfig::validate() const {
  const StabilizedPlant plant = build_plant(*this);
  objective.validate();
  if (strict_stepsize) compute_constants(objective, plant);
  timers.validate();
  rho.validate(timers);
  disturbance.make();
  if (!(horizon > 0.0) || !(sample_dt > 0.0) || !(window > 0.0) || !(solver_tol > 0.0)) {
    throw ConfigError("horizon, sample_dt, window and solver_tol must be positive");
  }
  if (horizon < 2.0 * window) {
    throw ConfigError("horizon must cover at least two asymptotic windows");
  }
  if (!(sim.substep > 0.0) || !(sim.zeno_factor > 1.0) || !(sim.event_tol > 0.0)) {
    throw ConfigError("substep and event_tol must be positive, zeno_factor above 1");
  }
  if (init.tau_c < 0.0 || init.tau_g < 0.0 || init.tau_d < 0.0) {
    throw ConfigError("initial timers must be non-negative");
  }
  if (!in_flow_set(init, timers, rho) && !in_jump_set(init)) {
    throw ConfigError("initial state lies outside the flow and jump sets");
  }
  for (double th : sweep.thetas) {
    for (double k : sweep.kappas) PerturbationRho::uniform(th, k).validate(timers);
  }
  if (batch.n < 1) throw ConfigError("batch_n must be at least 1");
}

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  ExperimentConfig cfg;
  if (root.IsNull()) return cfg;
  if (!root.IsMap()) throw ConfigError("config must be a flat key-value mapping");
  const auto& table = setters();
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(cfg, kv.second, key);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& c) {
  std::ostringstream os;
  const auto f = format_double;
  Vec6 eig;
  for (int i = 0; i < 6; ++i) eig(i) = c.eigenvalues[i];
  os << "mu: " << f(c.orbit.mu) << '\n'
     << "a: " << f(c.orbit.a) << '\n'
     << "m_c: " << f(c.orbit.m_c) << '\n'
     << "eigenvalues: " << list(eig) << '\n'
     << "q_u: " << weight<3>(c.objective.Q_u) << '\n'
     << "q_y: " << weight<6>(c.objective.Q_y) << '\n'
     << "y_hat: " << list(c.objective.y_hat) << '\n'
     << "u_lo: " << list(c.objective.box.lo) << '\n'
     << "u_hi: " << list(c.objective.box.hi) << '\n'
     << "gamma: " << f(c.objective.gamma) << '\n'
     << "strict_stepsize: " << (c.strict_stepsize ? "true" : "false") << '\n'
     << "tau_c_min: " << f(c.timers.tau_c_min) << '\n'
     << "tau_c_max: " << f(c.timers.tau_c_max) << '\n'
     << "tau_g_comp: " << f(c.timers.tau_g_comp) << '\n'
     << "reset_policy: " << to_string(c.timers.reset_policy) << '\n'
     << "case3_order: " << to_string(c.timers.case3_order) << '\n'
     << "seed: " << c.timers.seed << '\n'
     << "theta_g_comp: " << f(c.rho.theta_g_comp) << '\n'
     << "theta_c_min: " << f(c.rho.theta_c_min) << '\n'
     << "theta_c_max: " << f(c.rho.theta_c_max) << '\n'
     << "kappa_c: " << f(c.rho.kappa_c) << '\n'
     << "kappa_g: " << f(c.rho.kappa_g) << '\n'
     << "disturbance: " << c.disturbance.kind << '\n'
     << "disturbance_amplitude: " << f(c.disturbance.amplitude) << '\n'
     << "disturbance_omega: " << f(c.disturbance.omega) << '\n'
     << "sample_true_output: " << (c.sim.sample_true_output ? "true" : "false") << '\n'
     << "substep: " << f(c.sim.substep) << '\n'
     << "zeno_factor: " << f(c.sim.zeno_factor) << '\n'
     << "event_tol: " << f(c.sim.event_tol) << '\n'
     << "x0: " << list(c.init.x) << '\n'
     << "u0: " << list(c.init.u) << '\n'
     << "ys0: " << list(c.init.y_s) << '\n'
     << "z0: " << list(c.init.z) << '\n'
     << "tau_c0: " << f(c.init.tau_c) << '\n'
     << "tau_g0: " << f(c.init.tau_g) << '\n'
     << "tau_d0: " << f(c.init.tau_d) << '\n'
     << "horizon: " << f(c.horizon) << '\n'
     << "sample_dt: " << f(c.sample_dt) << '\n'
     << "window: " << f(c.window) << '\n'
     << "solver_tol: " << f(c.solver_tol) << '\n'
     << "init_err_mode: "
     << (c.init_err_mode == InitErrMode::Frozen ? "frozen" : "per-sample") << '\n'
     << "sweep_theta: " << list(c.sweep.thetas) << '\n'
     << "sweep_kappa: " << list(c.sweep.kappas) << '\n'
     << "sweep_reset_policy: " << to_string(c.sweep.reset_policy) << '\n'
     << "batch_n: " << c.batch.n << '\n'
     << "batch_seed: " << c.batch.seed << '\n'
     << "batch_x_lo: " << list(c.batch.x_lo) << '\n'
     << "batch_x_hi: " << list(c.batch.x_hi) << '\n'
     << "batch_ys_offset: " << f(c.batch.ys_offset) << '\n'
     << "out_dir: " << c.out_dir << '\n';
  return os.str();
}

}  // namespace hfo
