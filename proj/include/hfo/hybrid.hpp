#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hfo/disturbance.hpp"
#include "hfo/dynamics.hpp"
#include "hfo/objective.hpp"
#include "hfo/types.hpp"

namespace hfo {

using Vec21 = Eigen::Matrix<double, 21, 1>;

/// zeta = (x, u, y_s, z, tau_c, tau_g, tau_d). tau_c counts down to the next
/// input change, tau_g to the next completed gradient iteration, tau_d counts
/// up and stands in for time in d(.).
struct HybridState {
  Vec6 x = Vec6::Zero();
  Vec3 u = Vec3::Zero();
  Vec6 y_s = Vec6::Zero();
  Vec3 z = Vec3::Zero();
  double tau_c = 0.0;
  double tau_g = 0.0;
  double tau_d = 0.0;

  Vec21 to_vector() const;
  static HybridState from_vector(const Vec21& v);
};

enum class ResetPolicy { FixedMax, FixedMin, Midpoint, UniformRandom };
enum class Case3Order { G1ThenG2, G2ThenG1 };

std::string to_string(ResetPolicy p);
std::string to_string(Case3Order o);
ResetPolicy parse_reset_policy(const std::string& s);
Case3Order parse_case3_order(const std::string& s);

struct TimerConfig {
  double tau_c_min = 1.5;
  double tau_c_max = 2.0;
  double tau_g_comp = 0.5;
  ResetPolicy reset_policy = ResetPolicy::FixedMax;
  std::uint64_t seed = 0;
  Case3Order case3_order = Case3Order::G2ThenG1;

  /// Throws ConfigError on non-positive or inverted intervals and
  /// AssumptionViolation when ell < 1.
  void validate() const;
};

/// ell = floor(tau_c_min / tau_g_comp): guaranteed gradient iterations per
/// input epoch. Throws AssumptionViolation when ell < 1.
int assumption2_ell(const TimerConfig& cfg);

/// Timing perturbations: reset offsets theta and countdown-rate offsets kappa.
/// All zero is the nominal system.
struct PerturbationRho {
  double theta_g_comp = 0.0;
  double theta_c_min = 0.0;
  double theta_c_max = 0.0;
  double kappa_c = 0.0;
  double kappa_g = 0.0;

  /// max of the five fields.
  double rho() const;
  bool is_nominal() const;
  PerturbationRho scaled(double delta) const;
  /// Throws ConfigError when the perturbed timer intervals are empty or the
  /// countdown rates are not positive.
  void validate(const TimerConfig& cfg) const;

  /// theta_c_min = theta_c_max = theta_g_comp = theta, kappa_c = kappa_g = kappa.
  static PerturbationRho uniform(double theta, double kappa);
};

enum class JumpCase { CaseI, CaseII, CaseIII };
enum class JumpMap { G1, G2 };

std::string to_string(JumpCase c);
std::optional<JumpCase> parse_jump_case(const std::string& s);

struct SimOptions {
  /// Quadrature substep for the disturbance convolution, s.
  double substep = 0.01;
  /// Sample x + d instead of H u + d at input changes.
  bool sample_true_output = false;
  double zeno_factor = 10.0;
  /// Two events within this many seconds count as simultaneous.
  double event_tol = 1e-9;
};

/// Everything a run needs besides its initial state. Immutable and shareable.
struct HybridModel {
  StabilizedPlant plant;
  QuadObjective objective;
  DisturbancePtr disturbance;
  TimerConfig timers;
  PerturbationRho rho;
  SimOptions options;

  void validate() const;
  double tau_c_reset_lo() const { return timers.tau_c_min + rho.theta_c_min; }
  double tau_c_reset_hi() const { return timers.tau_c_max + rho.theta_c_max; }
  double tau_g_reset() const { return timers.tau_g_comp + rho.theta_g_comp; }
  /// Upper bound on jumps per unit time implied by the timer arithmetic.
  double jump_rate_bound() const;
};

bool in_flow_set(const HybridState& s, const TimerConfig& cfg, const PerturbationRho& rho = {});
bool in_jump_set(const HybridState& s);
/// Throws ContractViolation if s is not in the jump set.
JumpCase classify_jump(const HybridState& s);

/// Propagates x over flow intervals: exact matrix exponential for the state
/// and held input, composite Simpson quadrature for the disturbance
/// convolution. Caches propagators per substep length, so one instance must
/// not be shared between threads.
class FlowPropagator {
 public:
  explicit FlowPropagator(const HybridModel& model);

  /// Advances s by dt. Throws InvalidParameter for dt < 0 and
  /// ContractViolation if a timer would pass below zero.
  HybridState flow(const HybridState& s, double dt);

 private:
  struct Propagators {
    double h;
    Mat6 E;       // exp(A h)
    Mat6 E_half;  // exp(A h / 2)
    Mat63 G;      // (exp(A h) - I) A^{-1} B
  };
  const Propagators& propagators(double h);

  const HybridModel& model_;
  std::vector<Propagators> cache_;
};

HybridState flow(const HybridState& s, double dt, const HybridModel& model);

/// Gradient step: z <- gd_step(z, y_s), tau_g <- tau_g_comp (+ theta).
HybridState jump_g1(const HybridState& s, const HybridModel& model);
/// Input change: u <- z, y_s <- H u_prev + d(tau_d), tau_c <- reset value.
HybridState jump_g2(const HybridState& s, const HybridModel& model, std::mt19937_64& rng);
/// tau_c reset value under the configured policy.
double draw_tau_c_reset(const HybridModel& model, std::mt19937_64& rng);

struct JumpOutcome {
  JumpCase jump_case;
  std::vector<JumpMap> maps;          // one entry, or two for case (iii)
  std::vector<HybridState> states;    // state after each entry of maps
  const HybridState& result() const { return states.back(); }
};

JumpOutcome jump(const HybridState& s, const HybridModel& model, std::mt19937_64& rng);

struct TrajectorySample {
  double t = 0.0;
  int j = 0;
  HybridState state;
  /// Set on the post-jump row of every jump.
  std::optional<JumpCase> jump_case;
};

struct JumpRecord {
  double t = 0.0;
  int j = 0;  // jump counter after the jump
  JumpCase jump_case = JumpCase::CaseI;
  JumpMap map = JumpMap::G1;
};

/// Samples of a hybrid arc: periodic flow samples, the pre-jump state at the
/// end of every flow interval and the post-jump state of every jump.
struct HybridTrajectory {
  std::vector<TrajectorySample> samples;
  std::vector<JumpRecord> jumps;

  double t_end() const { return samples.empty() ? 0.0 : samples.back().t; }
  int j_end() const { return samples.empty() ? 0 : samples.back().j; }
};

/// Event-driven simulation over [0, horizon_t]. Flow intervals end exactly at
/// the next timer zero, so no event search is involved.
HybridTrajectory simulate(const HybridState& init, double horizon_t, const HybridModel& model,
                          double sample_dt);

}  // namespace hfo
