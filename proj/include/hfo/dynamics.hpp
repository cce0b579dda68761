#pragma once

#include <array>

#include "hfo/types.hpp"

namespace hfo {

inline constexpr double kEarthMu = 3.986e14;  // m^3/s^2

/// Target orbit and chaser mass.
struct OrbitalParams {
  double mu = kEarthMu;  // m^3/s^2
  double a = 6.871e6;    // orbital radius, m
  double m_c = 1.0;      // chaser mass, kg

  /// Mean motion w = sqrt(mu / a^3), rad/s.
  double mean_motion() const;

  /// Throws InvalidParameter unless mu, a, m_c are finite and positive.
  void validate() const;
};

/// Clohessy-Wiltshire relative dynamics xdot = A_cw x + B_cw u with
/// x = (x, y, z, xdot, ydot, zdot).
struct CwModel {
  Mat6 A;
  Mat63 B;
  double w = 0.0;
  double m_c = 1.0;
};

CwModel build_cw(const OrbitalParams& params);
/// Direct form for a given mean motion; w = 0 yields the double integrator.
CwModel build_cw(double w, double m_c);

/// Desired closed-loop spectrum. Channel pairing follows listed order:
/// (l1,l2) -> x, (l3,l4) -> y, (l5,l6) -> z.
class EigenSpec {
 public:
  /// Throws AssumptionViolation if any value is not finite and strictly
  /// negative.
  explicit EigenSpec(const std::array<double, 6>& lambdas);

  const std::array<double, 6>& lambdas() const { return lambdas_; }
  double operator[](std::size_t i) const { return lambdas_[i]; }

  /// Largest multiplicity in the multiset (exact comparison).
  int mu_max() const { return mu_max_; }
  /// Element of smallest magnitude (the slowest mode).
  double lambda_slow() const { return lambda_slow_; }
  /// Element of largest magnitude (the fastest mode).
  double lambda_fast() const { return lambda_fast_; }

 private:
  std::array<double, 6> lambdas_;
  int mu_max_ = 1;
  double lambda_slow_ = 0.0;
  double lambda_fast_ = 0.0;
};

/// Gain matrix laid out as k1..k18 row-major; only k1, k4, k5, k8, k10,
/// k11, k15, k18 are ever nonzero.
struct GainMatrix {
  Mat36 K = Mat36::Zero();

  /// 1-based access in the k1..k18 numbering.
  double k(int index) const { return K((index - 1) / 6, (index - 1) % 6); }
};

/// Closed-form gains placing eig(A_cw - B_cw K) at the spec, for unit mass.
GainMatrix synthesize_gains(double w, const EigenSpec& spec);

struct StabilizedPlant {
  Mat6 A;        // A_stab
  Mat63 B;       // B_stab = B_cw
  GainMatrix gains;
  Mat36 K_eff;   // gain applied on the physical input path, m_c * K
  Mat63 H;       // steady-state map -A_stab^{-1} B_stab
  Mat6 A_inv;
  EigenSpec spec;
  double m_c = 1.0;
  double w = 0.0;
  double norm_A_inv = 0.0;
  double norm_K = 0.0;  // operator 2-norm of K_eff
};

/// A_stab = A_cw - B_cw K_eff with K_eff = m_c K so that A_stab is
/// independent of the chaser mass. Throws SynthesisFailure if A_stab is
/// singular.
StabilizedPlant build_stabilized(const CwModel& cw, const GainMatrix& gains,
                                 const EigenSpec& spec);

/// Convenience: CW model, gains and plant in one go.
StabilizedPlant build_plant(const OrbitalParams& params, const EigenSpec& spec);

/// True iff the sorted numerical eigenvalues of A_stab match the sorted
/// spec within tol (real parts and |imag| both checked).
bool verify_eigen_placement(const StabilizedPlant& plant, double tol);

/// mu_max * (|l_fast| / |l_slow|) * exp(-|l_slow| t).
double matrix_exp_decay_bound(const StabilizedPlant& plant, double t);

}  // namespace hfo
