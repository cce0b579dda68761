#pragma once

#include <array>
#include <limits>
#include <vector>

#include "hfo/hybrid.hpp"
#include "hfo/types.hpp"

namespace hfo {

/// Every symbol of the convergence envelopes.
struct BoundParams {
  int mu_max = 1;
  double lam_slow = 0.0;  // |l1|
  double lam_fast = 0.0;  // |l6|
  double d_U = 0.0;
  double m_c = 1.0;
  double q = 0.0;
  int ell = 1;
  double d_bar = 0.0;
  double norm_A_inv = 0.0;
  double norm_K = 0.0;
  double tau_c_min = 0.0;
  double tau_c_max = 0.0;

  /// Throws InvalidParameter unless the rates, mass and timers are positive,
  /// the remaining magnitudes non-negative, q in (0, 1) and ell >= 1.
  void validate() const;
};

/// Collects the bound parameters of a model. q is taken from
/// evaluate_constants and may lie outside (0, 1); d_bar defaults to the
/// disturbance's vector-norm derivative bound.
BoundParams make_bound_params(const HybridModel& model);

int mu_max(const EigenSpec& spec);

struct ErrorPoint {
  double t = 0.0;
  int j = 0;
  double err = 0.0;
  Vec6 x_tilde = Vec6::Zero();
};

struct ErrorSeries {
  std::vector<ErrorPoint> points;
};

/// err = ||x(t, j) - x~(t)|| per sample. x~ is recomputed at every sample
/// time with warm-started projected gradient descent.
ErrorSeries rendezvous_error(const HybridTrajectory& traj, const QuadObjective& obj,
                             const StabilizedPlant& plant, const DisturbanceModel& dist,
                             double tol, Exec exec = Exec::Parallel);

/// sup of err over the last `window` seconds. Throws InsufficientData when
/// the series spans less than 2 * window.
double asymptotic_error(const ErrorSeries& series, double window);

double prop_bound(double t, const BoundParams& p, double init_err);
double prop_asymptote(const BoundParams& p);
double thm_bound(double t, const BoundParams& p, double init_err);
double thm_asymptote(const BoundParams& p);

enum class InitErrMode {
  /// ||x(0, 0) - x~(t)|| re-evaluated at every t.
  PerSample,
  /// ||x(0, 0) - x~(0)|| held fixed.
  Frozen,
};

struct EnvelopeReport {
  std::vector<double> prop;
  std::vector<double> thm;
  /// thm_bound(t) - err(t) per sample.
  std::vector<double> margins;
  std::size_t violations = 0;
  double min_margin = std::numeric_limits<double>::infinity();

  bool holds() const { return violations == 0; }
};

/// Evaluates both envelopes at every sample of the series; x0 is the
/// initial chaser state.
EnvelopeReport check_envelope(const ErrorSeries& series, const BoundParams& p, const Vec6& x0,
                              InitErrMode mode = InitErrMode::PerSample,
                              Exec exec = Exec::Parallel);
/// Fixed init_err for every sample.
EnvelopeReport check_envelope(const ErrorSeries& series, const BoundParams& p, double init_err,
                              Exec exec = Exec::Parallel);

struct InputGapEpoch {
  double t = 0.0;       // time of the closing input change
  int alpha = 0;        // gradient steps taken during the epoch
  double gap = 0.0;     // ||u_applied - z*||
  double bound = 0.0;   // q^{alpha/2} d_U
  bool ok() const { return gap <= bound; }
};

struct InputGapReport {
  std::vector<InputGapEpoch> epochs;
  std::size_t failures = 0;
  bool holds() const { return failures == 0; }
};

/// For every input change, compares the applied input with the fixed point
/// z* of the gradient step under the sample held during the epoch, against
/// q^{alpha/2} d_U. The slack absorbs the solver tolerance.
InputGapReport input_gap_check(const HybridTrajectory& traj, const QuadObjective& obj,
                               const StabilizedPlant& plant, const BoundParams& p,
                               double slack = 1e-9);

struct EigenSelectionResult {
  double required_lam_fast = 0.0;
  double required_lam_slow = 0.0;
  bool lam_fast_ok = false;
  bool lam_slow_ok = false;
  /// Theorem asymptote with the negative exponential term dropped.
  double asymptote_bound = 0.0;

  bool holds() const { return lam_fast_ok && lam_slow_ok; }
};

/// The two eigenvalue lower bounds that place the Theorem asymptote below
/// eta. |l1| and |l6| come from the spec; everything else from p.
EigenSelectionResult eigenvalue_selection_check(const EigenSpec& spec, double eta,
                                                const BoundParams& p);

/// Smallest eps such that the two arcs are (tau, eps)-close, evaluated on a
/// resampling grid of the given resolution. Throws InsufficientData when an
/// arc does not reach hybrid time tau; returns infinity when a jump index of
/// one arc is missing from the other.
double tau_eps_closeness(const HybridTrajectory& a, const HybridTrajectory& b, double tau,
                         double resolution = 1e-3);

struct QuadraticFit {
  /// err ~ c0 + c1 k + c2 th + c3 k^2 + c4 th^2 + c5 k th.
  std::array<double, 6> coefficients{};
  double r_squared = 0.0;
  double max_abs_residual = 0.0;
};

struct ResponseSample {
  double kappa = 0.0;
  double theta = 0.0;
  double err = 0.0;
};

/// Least-squares quadratic response surface. Throws RegressionError for
/// fewer than 6 samples or a rank-deficient design.
QuadraticFit fit_quadratic_response(const std::vector<ResponseSample>& samples);

}  // namespace hfo
