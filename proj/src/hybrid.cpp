#include "hfo/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "hfo/errors.hpp"

namespace hfo {

Vec21 HybridState::to_vector() const {
  Vec21 v;
  v << x, u, y_s, z, tau_c, tau_g, tau_d;
  return v;
}

HybridState HybridState::from_vector(const Vec21& v) {
  HybridState s;
  s.x = v.segment<6>(0);
  s.u = v.segment<3>(6);
  s.y_s = v.segment<6>(9);
  s.z = v.segment<3>(15);
  s.tau_c = v(18);
  s.tau_g = v(19);
  s.tau_d = v(20);
  return s;
}

std::string to_string(ResetPolicy p) {
  switch (p) {
    case ResetPolicy::FixedMax: return "fixed-max";
    case ResetPolicy::FixedMin: return "fixed-min";
    case ResetPolicy::Midpoint: return "midpoint";
    case ResetPolicy::UniformRandom: return "uniform-random";
  }
  return "?";
}

std::string to_string(Case3Order o) {
  return o == Case3Order::G1ThenG2 ? "G1-then-G2" : "G2-then-G1";
}

ResetPolicy parse_reset_policy(const std::string& s) {
  for (auto p : {ResetPolicy::FixedMax, ResetPolicy::FixedMin, ResetPolicy::Midpoint,
                 ResetPolicy::UniformRandom}) {
    if (s == to_string(p)) return p;
  }
  throw ConfigError("unknown reset policy '" + s + "'");
}

Case3Order parse_case3_order(const std::string& s) {
  if (s == "G1-then-G2") return Case3Order::G1ThenG2;
  if (s == "G2-then-G1") return Case3Order::G2ThenG1;
  throw ConfigError("unknown case (iii) order '" + s + "'");
}

std::string to_string(JumpCase c) {
  switch (c) {
    case JumpCase::CaseI: return "i";
    case JumpCase::CaseII: return "ii";
    case JumpCase::CaseIII: return "iii";
  }
  return "?";
}

std::optional<JumpCase> parse_jump_case(const std::string& s) {
  if (s == "i") return JumpCase::CaseI;
  if (s == "ii") return JumpCase::CaseII;
  if (s == "iii") return JumpCase::CaseIII;
  return std::nullopt;
}

void TimerConfig::validate() const {
  if (!std::isfinite(tau_c_min) || !std::isfinite(tau_c_max) || !std::isfinite(tau_g_comp)) {
    throw ConfigError("timer parameters must be finite");
  }
  if (!(tau_c_min > 0.0 && tau_c_min <= tau_c_max)) {
    throw ConfigError("timers require 0 < tau_c_min <= tau_c_max");
  }
  if (!(tau_g_comp > 0.0)) {
    throw ConfigError("timers require tau_g_comp > 0");
  }
  assumption2_ell(*this);
}

int assumption2_ell(const TimerConfig& cfg) {
  // A ratio that is an integer up to rounding (1.5 / 0.5) must not lose one.
  const double ratio = cfg.tau_c_min / cfg.tau_g_comp;
  const int ell = static_cast<int>(std::floor(ratio * (1.0 + 1e-12)));
  if (ell < 1) {
    throw AssumptionViolation("tau_c_min = " + std::to_string(cfg.tau_c_min) +
                              " is shorter than one gradient iteration (tau_g_comp = " +
                              std::to_string(cfg.tau_g_comp) + ")");
  }
  return ell;
}

double PerturbationRho::rho() const {
  return std::max({theta_g_comp, theta_c_min, theta_c_max, kappa_c, kappa_g});
}

bool PerturbationRho::is_nominal() const {
  return theta_g_comp == 0.0 && theta_c_min == 0.0 && theta_c_max == 0.0 && kappa_c == 0.0 &&
         kappa_g == 0.0;
}

PerturbationRho PerturbationRho::scaled(double delta) const {
  return {delta * theta_g_comp, delta * theta_c_min, delta * theta_c_max, delta * kappa_c,
          delta * kappa_g};
}

void PerturbationRho::validate(const TimerConfig& cfg) const {
  if (!(theta_g_comp > -cfg.tau_g_comp)) {
    throw ConfigError("theta_g_comp must exceed -tau_g_comp");
  }
  if (!(theta_c_min > -cfg.tau_c_min) || !(theta_c_max > -cfg.tau_c_max)) {
    throw ConfigError("theta_c_min/theta_c_max must exceed -tau_c_min/-tau_c_max");
  }
  if (!(cfg.tau_c_min + theta_c_min <= cfg.tau_c_max + theta_c_max)) {
    throw ConfigError("perturbed tau_c reset interval is empty");
  }
  if (!(kappa_c < 1.0) || !(kappa_g < 1.0)) {
    throw ConfigError("kappa_c and kappa_g must be below 1");
  }
}

PerturbationRho PerturbationRho::uniform(double theta, double kappa) {
  return {theta, theta, theta, kappa, kappa};
}

void HybridModel::validate() const {
  objective.validate();
  timers.validate();
  rho.validate(timers);
  if (!disturbance) {
    throw ConfigError("hybrid model has no disturbance");
  }
  if (!(options.substep > 0.0) || !(options.zeno_factor > 1.0) || !(options.event_tol > 0.0)) {
    throw ConfigError("invalid simulation options");
  }
}

double HybridModel::jump_rate_bound() const {
  return (1.0 - rho.kappa_g) / tau_g_reset() + (1.0 - rho.kappa_c) / tau_c_reset_lo();
}

bool in_flow_set(const HybridState& s, const TimerConfig& cfg, const PerturbationRho& rho) {
  return s.tau_c >= 0.0 && s.tau_c <= cfg.tau_c_max + rho.theta_c_max && s.tau_g >= 0.0 &&
         s.tau_g <= cfg.tau_g_comp + rho.theta_g_comp;
}

bool in_jump_set(const HybridState& s) { return s.tau_c == 0.0 || s.tau_g == 0.0; }

JumpCase classify_jump(const HybridState& s) {
  const bool c_zero = s.tau_c == 0.0;
  const bool g_zero = s.tau_g == 0.0;
  if (c_zero && g_zero) return JumpCase::CaseIII;
  if (g_zero) return JumpCase::CaseI;
  if (c_zero) return JumpCase::CaseII;
  throw ContractViolation("state is not in the jump set");
}

FlowPropagator::FlowPropagator(const HybridModel& model) : model_(model) {}

const FlowPropagator::Propagators& FlowPropagator::propagators(double h) {
  for (const auto& p : cache_) {
    if (p.h == h) return p;
  }
  if (cache_.size() >= 32) cache_.erase(cache_.begin());

  const Mat6& A = model_.plant.A;
  // exp([[A, B], [0, 0]] h) carries int_0^h exp(A s) ds B in its top-right block.
  Eigen::Matrix<double, 9, 9> aug = Eigen::Matrix<double, 9, 9>::Zero();
  aug.topLeftCorner<6, 6>() = A;
  aug.topRightCorner<6, 3>() = model_.plant.B;
  const Eigen::Matrix<double, 9, 9> aug_exp = (aug * h).exp();

  Propagators p;
  p.h = h;
  p.E = aug_exp.topLeftCorner<6, 6>();
  p.G = aug_exp.topRightCorner<6, 3>();
  p.E_half = (A * (0.5 * h)).exp();
  cache_.push_back(p);
  return cache_.back();
}

HybridState FlowPropagator::flow(const HybridState& s, double dt) {
  if (!(dt >= 0.0)) {
    throw InvalidParameter("flow requires dt >= 0");
  }
  HybridState out = s;
  const double rate_c = 1.0 - model_.rho.kappa_c;
  const double rate_g = 1.0 - model_.rho.kappa_g;
  out.tau_c = s.tau_c - rate_c * dt;
  out.tau_g = s.tau_g - rate_g * dt;
  out.tau_d = s.tau_d + dt;
  const double slack = model_.options.event_tol;
  if (out.tau_c < -slack || out.tau_g < -slack) {
    throw ContractViolation("flow interval leaves the flow set");
  }
  out.tau_c = std::max(out.tau_c, 0.0);
  out.tau_g = std::max(out.tau_g, 0.0);
  if (dt == 0.0) return out;

  const int n = std::max(1, static_cast<int>(std::ceil(dt / model_.options.substep - 1e-9)));
  const double h = dt / n;
  const Propagators& p = propagators(h);
  const DisturbanceModel& dist = *model_.disturbance;
  const bool disturbed = dist.d_max() > 0.0;
  const Mat6 BK = model_.plant.B * model_.plant.K_eff;
  const Vec6 input_term = p.G * s.u;

  Vec6 x = s.x;
  for (int k = 0; k < n; ++k) {
    x = p.E * x + input_term;
    if (disturbed) {
      const double tau = s.tau_d + k * h;
      const Vec6 g0 = BK * dist.eval(tau);
      const Vec6 g1 = BK * dist.eval(tau + 0.5 * h);
      const Vec6 g2 = BK * dist.eval(tau + h);
      x -= (h / 6.0) * (p.E * g0 + 4.0 * (p.E_half * g1) + g2);
    }
  }
  out.x = x;
  return out;
}

HybridState flow(const HybridState& s, double dt, const HybridModel& model) {
  FlowPropagator prop(model);
  return prop.flow(s, dt);
}

HybridState jump_g1(const HybridState& s, const HybridModel& model) {
  HybridState out = s;
  out.z = gd_step(model.objective, model.plant.H, s.z, s.y_s);
  out.tau_g = model.tau_g_reset();
  return out;
}

double draw_tau_c_reset(const HybridModel& model, std::mt19937_64& rng) {
  const double lo = model.tau_c_reset_lo();
  const double hi = model.tau_c_reset_hi();
  switch (model.timers.reset_policy) {
    case ResetPolicy::FixedMax: return hi;
    case ResetPolicy::FixedMin: return lo;
    case ResetPolicy::Midpoint: return 0.5 * (lo + hi);
    case ResetPolicy::UniformRandom: {
      if (lo == hi) return lo;
      std::uniform_real_distribution<double> dist(lo, hi);
      return dist(rng);
    }
  }
  return hi;
}

HybridState jump_g2(const HybridState& s, const HybridModel& model, std::mt19937_64& rng) {
  HybridState out = s;
  const Vec6 d = model.disturbance->eval(s.tau_d);
  out.y_s = model.options.sample_true_output ? Vec6(s.x + d) : Vec6(model.plant.H * s.u + d);
  out.u = s.z;
  out.tau_c = draw_tau_c_reset(model, rng);
  return out;
}

JumpOutcome jump(const HybridState& s, const HybridModel& model, std::mt19937_64& rng) {
  JumpOutcome out{.jump_case = classify_jump(s), .maps = {}, .states = {}};
  auto apply = [&](JumpMap map, const HybridState& from) {
    out.maps.push_back(map);
    out.states.push_back(map == JumpMap::G1 ? jump_g1(from, model) : jump_g2(from, model, rng));
  };
  switch (out.jump_case) {
    case JumpCase::CaseI: apply(JumpMap::G1, s); break;
    case JumpCase::CaseII: apply(JumpMap::G2, s); break;
    case JumpCase::CaseIII:
      if (model.timers.case3_order == Case3Order::G2ThenG1) {
        apply(JumpMap::G2, s);
        apply(JumpMap::G1, out.states.back());
      } else {
        apply(JumpMap::G1, s);
        apply(JumpMap::G2, out.states.back());
      }
      break;
  }
  return out;
}

HybridTrajectory simulate(const HybridState& init, double horizon_t, const HybridModel& model,
                          double sample_dt) {
  model.validate();
  if (!(horizon_t > 0.0) || !std::isfinite(horizon_t)) {
    throw InvalidParameter("horizon must be positive");
  }
  if (!(sample_dt > 0.0)) {
    throw InvalidParameter("sample_dt must be positive");
  }
  if (!in_flow_set(init, model.timers, model.rho) && !in_jump_set(init)) {
    throw ContractViolation("initial state is neither in the flow set nor in the jump set");
  }
  if (init.tau_c < 0.0 || init.tau_g < 0.0 || init.tau_d < 0.0) {
    throw ContractViolation("initial timers must be non-negative");
  }

  std::mt19937_64 rng(model.timers.seed);
  FlowPropagator prop(model);
  const double tol = model.options.event_tol;
  const double rate_c = 1.0 - model.rho.kappa_c;
  const double rate_g = 1.0 - model.rho.kappa_g;
  const double jump_rate = model.jump_rate_bound();

  HybridTrajectory traj;
  HybridState s = init;
  double t = 0.0;
  int j = 0;
  long k_sample = 1;
  traj.samples.push_back({t, j, s, std::nullopt});

  while (true) {
    while (in_jump_set(s)) {
      const JumpOutcome out = jump(s, model, rng);
      for (std::size_t i = 0; i < out.maps.size(); ++i) {
        ++j;
        s = out.states[i];
        traj.samples.push_back({t, j, s, out.jump_case});
        traj.jumps.push_back({t, j, out.jump_case, out.maps[i]});
      }
      if (j > model.options.zeno_factor * (jump_rate * t + 4.0)) {
        throw ZenoGuard("jump count " + std::to_string(j) + " at t = " + std::to_string(t) +
                        " exceeds the analytic rate bound");
      }
    }
    if (t >= horizon_t - tol) break;

    const double t_event = t + std::min(s.tau_c / rate_c, s.tau_g / rate_g);
    const double t_sample = static_cast<double>(k_sample) * sample_dt;
    double t_next = std::min({t_event, t_sample, horizon_t});
    const bool is_event = t_event - t_next <= tol;
    if (is_event) t_next = t_event;

    s = prop.flow(s, t_next - t);
    t = t_next;
    if (is_event) {
      if (s.tau_c <= tol * rate_c) s.tau_c = 0.0;
      if (s.tau_g <= tol * rate_g) s.tau_g = 0.0;
    }

    bool recorded = false;
    while (static_cast<double>(k_sample) * sample_dt <= t + tol) {
      if (!recorded) traj.samples.push_back({t, j, s, std::nullopt});
      recorded = true;
      ++k_sample;
    }
    if (!recorded && (is_event || t >= horizon_t - tol)) {
      traj.samples.push_back({t, j, s, std::nullopt});
    }
  }
  return traj;
}

}  // namespace hfo
