#include "hfo/objective.hpp"

#include <cmath>
#include <string>

#include "hfo/errors.hpp"

namespace hfo {

namespace {

void require_spd(const Eigen::MatrixXd& m, const char* name) {
  if (!m.allFinite() || !m.isApprox(m.transpose(), 1e-12)) {
    throw InvalidParameter(std::string(name) + " must be finite and symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw InvalidParameter(std::string(name) + " must be positive definite");
  }
}

// Projected gradient descent on 1/2 u'Mu + b'u; `residual` decides
// convergence so callers can phrase it in terms of their own update map.
template <typename Residual>
Vec3 pgd(const Mat3& M, const Vec3& b, const InputBox& box, const SolverOptions& opts,
         const std::optional<Vec3>& warm_start, Residual&& residual) {
  if (!(opts.tol > 0.0)) {
    throw InvalidParameter("solver tolerance must be positive");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(M, Eigen::EigenvaluesOnly);
  const double step = 1.0 / eig.eigenvalues().maxCoeff();

  Vec3 u = project_box(warm_start.value_or(Vec3::Zero()), box);
  for (long it = 0; it < opts.max_iter; ++it) {
    if (residual(u) <= opts.tol) return u;
    u = project_box(u - step * (M * u + b), box);
  }
  if (residual(u) <= opts.tol) return u;
  throw NonConvergence("box-constrained QP did not converge within " +
                       std::to_string(opts.max_iter) + " iterations");
}

}  // namespace

bool InputBox::contains(const Vec3& v, double slack) const {
  return (v.array() >= lo.array() - slack).all() && (v.array() <= hi.array() + slack).all();
}

void InputBox::validate() const {
  if (!lo.allFinite() || !hi.allFinite() || (lo.array() > hi.array()).any()) {
    throw InvalidParameter("input box requires finite lo <= hi");
  }
  if (!(diameter() > 0.0)) {
    throw InvalidParameter("input box must have positive diameter");
  }
}

InputBox InputBox::symmetric(double half_width) {
  return InputBox{Vec3::Constant(-half_width), Vec3::Constant(half_width)};
}

void QuadObjective::validate() const {
  require_spd(Q_u, "Q_u");
  require_spd(Q_y, "Q_y");
  if (!y_hat.allFinite() || y_hat.tail<3>().cwiseAbs().maxCoeff() != 0.0) {
    throw InvalidParameter("target velocity components of y_hat must be zero");
  }
  box.validate();
  if (!std::isfinite(gamma) || gamma <= 0.0) {
    throw StepsizeInvalid("stepsize gamma must be positive");
  }
}

double eval_phi(const QuadObjective& obj, const Vec3& u, const Vec6& y) {
  const Vec6 e = y - obj.y_hat;
  return 0.5 * u.dot(obj.Q_u * u) + 0.5 * e.dot(obj.Q_y * e);
}

Vec3 reduced_gradient(const QuadObjective& obj, const Mat63& H, const Vec3& z, const Vec6& y_s) {
  return obj.Q_u * z + H.transpose() * (obj.Q_y * (y_s - obj.y_hat));
}

Vec3 reduced_gradient(const QuadObjective& obj, const StabilizedPlant& plant, const Vec3& z,
                      const Vec6& y_s) {
  return reduced_gradient(obj, plant.H, z, y_s);
}

Vec3 project_box(const Vec3& v, const InputBox& box) { return v.cwiseMax(box.lo).cwiseMin(box.hi); }

Vec3 gd_step(const QuadObjective& obj, const Mat63& H, const Vec3& z, const Vec6& y_s) {
  return project_box(z - obj.gamma * reduced_gradient(obj, H, z, y_s), obj.box);
}

Vec3 gd_step(const QuadObjective& obj, const StabilizedPlant& plant, const Vec3& z,
             const Vec6& y_s) {
  return gd_step(obj, plant.H, z, y_s);
}

ConvexityConstants evaluate_constants(const QuadObjective& obj, const Mat63& H) {
  const Mat3 M = obj.Q_u + H.transpose() * obj.Q_y * H;
  Eigen::SelfAdjointEigenSolver<Mat3> eig_m(M, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Mat3> eig_u(obj.Q_u, Eigen::EigenvaluesOnly);
  ConvexityConstants c;
  c.L = eig_m.eigenvalues().maxCoeff();
  c.lambda_min_Qu = eig_u.eigenvalues().minCoeff();
  c.q = 1.0 - 2.0 * obj.gamma * c.lambda_min_Qu + obj.gamma * obj.gamma * c.L * c.L;
  c.gamma_max = 2.0 / (c.lambda_min_Qu + c.L);
  return c;
}

ConvexityConstants compute_constants(const QuadObjective& obj, const Mat63& H) {
  const ConvexityConstants c = evaluate_constants(obj, H);
  if (!(obj.gamma > 0.0 && obj.gamma < c.gamma_max)) {
    throw StepsizeInvalid("gamma = " + std::to_string(obj.gamma) + " outside (0, " +
                          std::to_string(c.gamma_max) + ")");
  }
  if (!(c.q > 0.0 && c.q < 1.0)) {
    throw StepsizeInvalid("contraction factor q = " + std::to_string(c.q) + " outside (0, 1)");
  }
  return c;
}

ConvexityConstants compute_constants(const QuadObjective& obj, const StabilizedPlant& plant) {
  return compute_constants(obj, plant.H);
}

Vec3 solve_box_qp(const Mat3& M, const Vec3& b, const InputBox& box, const SolverOptions& opts,
                  const std::optional<Vec3>& warm_start, std::optional<double> residual_step) {
  Eigen::SelfAdjointEigenSolver<Mat3> eig(M, Eigen::EigenvaluesOnly);
  const double r = residual_step.value_or(1.0 / eig.eigenvalues().maxCoeff());
  return pgd(M, b, box, opts, warm_start,
             [&](const Vec3& u) { return (project_box(u - r * (M * u + b), box) - u).norm(); });
}

Vec3 solve_optimal_input(const QuadObjective& obj, const Mat63& H, const Vec6& d,
                         const SolverOptions& opts, const std::optional<Vec3>& warm_start) {
  const Mat3 M = obj.Q_u + H.transpose() * obj.Q_y * H;
  const Vec3 b = H.transpose() * (obj.Q_y * (d - obj.y_hat));
  return pgd(M, b, obj.box, opts, warm_start,
             [&](const Vec3& u) { return (gd_step(obj, H, u, H * u + d) - u).norm(); });
}

Vec3 solve_optimal_input(const QuadObjective& obj, const StabilizedPlant& plant, const Vec6& d,
                         double tol) {
  return solve_optimal_input(obj, plant.H, d, SolverOptions{.tol = tol});
}

Vec3 solve_frozen_sample_optimum(const QuadObjective& obj, const Mat63& H, const Vec6& y_s,
                                 const SolverOptions& opts) {
  const Vec3 b = H.transpose() * (obj.Q_y * (y_s - obj.y_hat));
  return pgd(obj.Q_u, b, obj.box, opts, std::nullopt,
             [&](const Vec3& z) { return (gd_step(obj, H, z, y_s) - z).norm(); });
}

Vec6 rendezvous_point_from_input(const StabilizedPlant& plant, const Vec3& u_opt, const Vec6& d) {
  // -A^{-1}B = H, so x~ = H (u~ - K_eff d).
  return plant.H * (u_opt - plant.K_eff * d);
}

Vec6 chosen_rendezvous_point(const QuadObjective& obj, const StabilizedPlant& plant,
                             const Vec6& d, double tol) {
  return rendezvous_point_from_input(plant, solve_optimal_input(obj, plant, d, tol), d);
}

}  // namespace hfo
