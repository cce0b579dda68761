#pragma once

#include <optional>

#include "hfo/dynamics.hpp"
#include "hfo/types.hpp"

namespace hfo {

/// Axis-aligned input box U = [lo, hi] (N).
struct InputBox {
  Vec3 lo = Vec3::Constant(-0.4);
  Vec3 hi = Vec3::Constant(0.4);

  /// Euclidean diameter ||hi - lo||.
  double diameter() const { return (hi - lo).norm(); }
  bool contains(const Vec3& v, double slack = 0.0) const;
  /// Throws InvalidParameter if lo > hi anywhere or the diameter is zero.
  void validate() const;

  static InputBox symmetric(double half_width);
};

/// Phi(u, y) = 1/2 u'Q_u u + 1/2 (y - y_hat)'Q_y (y - y_hat).
struct QuadObjective {
  Mat3 Q_u = Mat3::Identity();
  Mat6 Q_y = Mat6::Identity();
  Vec6 y_hat = Vec6::Zero();
  InputBox box;
  double gamma = 0.1;

  /// Symmetry and positive definiteness of both weights, zero target
  /// velocity, positive stepsize. The stepsize upper limit needs the plant
  /// and is checked by compute_constants.
  void validate() const;
};

struct ConvexityConstants {
  double L = 0.0;
  double q = 0.0;
  double lambda_min_Qu = 0.0;
  /// Upper end of the admissible stepsize interval, 2 / (lambda_min(Q_u) + L).
  double gamma_max = 0.0;

  bool valid(double gamma) const { return gamma > 0.0 && gamma < gamma_max && q > 0.0 && q < 1.0; }
};

double eval_phi(const QuadObjective& obj, const Vec3& u, const Vec6& y);

/// Q_u z + H' Q_y (y_s - y_hat).
Vec3 reduced_gradient(const QuadObjective& obj, const Mat63& H, const Vec3& z, const Vec6& y_s);
Vec3 reduced_gradient(const QuadObjective& obj, const StabilizedPlant& plant, const Vec3& z,
                      const Vec6& y_s);

Vec3 project_box(const Vec3& v, const InputBox& box);

/// One projected gradient step with the output sample held fixed.
Vec3 gd_step(const QuadObjective& obj, const Mat63& H, const Vec3& z, const Vec6& y_s);
Vec3 gd_step(const QuadObjective& obj, const StabilizedPlant& plant, const Vec3& z,
             const Vec6& y_s);

/// L and q without validation; q may fall outside (0, 1).
ConvexityConstants evaluate_constants(const QuadObjective& obj, const Mat63& H);

/// As evaluate_constants, but throws StepsizeInvalid unless
/// gamma in (0, gamma_max) and q in (0, 1).
ConvexityConstants compute_constants(const QuadObjective& obj, const Mat63& H);
ConvexityConstants compute_constants(const QuadObjective& obj, const StabilizedPlant& plant);

struct SolverOptions {
  double tol = 1e-10;
  long max_iter = 1'000'000;
};

/// argmin over the box of 1/2 u'M u + b'u for symmetric positive definite M,
/// by projected gradient descent with step 1/lambda_max(M). Converged when
/// the fixed-point residual ||Pi[u - residual_step (M u + b)] - u|| <= tol;
/// residual_step defaults to the iteration step.
Vec3 solve_box_qp(const Mat3& M, const Vec3& b, const InputBox& box, const SolverOptions& opts,
                  const std::optional<Vec3>& warm_start = std::nullopt,
                  std::optional<double> residual_step = std::nullopt);

/// Minimizer u~ of Phi(u, H u + d) over U. The returned point satisfies
/// ||gd_step(u~, H u~ + d) - u~|| <= tol with the objective's own gamma.
/// Throws NonConvergence after max_iter iterations.
Vec3 solve_optimal_input(const QuadObjective& obj, const Mat63& H, const Vec6& d,
                         const SolverOptions& opts = {},
                         const std::optional<Vec3>& warm_start = std::nullopt);
Vec3 solve_optimal_input(const QuadObjective& obj, const StabilizedPlant& plant, const Vec6& d,
                         double tol);

/// Fixed point of z -> gd_step(z, y_s) with the sample y_s frozen, i.e. the
/// minimizer over U of 1/2 z'Q_u z + z'H'Q_y (y_s - y_hat).
Vec3 solve_frozen_sample_optimum(const QuadObjective& obj, const Mat63& H, const Vec6& y_s,
                                 const SolverOptions& opts = {});

/// x~ = -A^{-1} B u~ + A^{-1} B K_eff d, the steady state induced by the
/// optimal input and the disturbance.
Vec6 rendezvous_point_from_input(const StabilizedPlant& plant, const Vec3& u_opt, const Vec6& d);
Vec6 chosen_rendezvous_point(const QuadObjective& obj, const StabilizedPlant& plant,
                             const Vec6& d, double tol);

}  // namespace hfo
