#include "hfo/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hfo/errors.hpp"

namespace hfo {

namespace {

void require_positive(double value, const char* name) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw InvalidParameter(std::string(name) + " must be finite and positive, got " +
                           std::to_string(value));
  }
}

}  // namespace

double OrbitalParams::mean_motion() const { return std::sqrt(mu / (a * a * a)); }

void OrbitalParams::validate() const {
  require_positive(mu, "mu");
  require_positive(a, "a");
  require_positive(m_c, "m_c");
  require_positive(mean_motion(), "mean motion");
}

CwModel build_cw(const OrbitalParams& params) {
  params.validate();
  return build_cw(params.mean_motion(), params.m_c);
}

CwModel build_cw(double w, double m_c) {
  if (!std::isfinite(w) || w < 0.0) {
    throw InvalidParameter("mean motion must be finite and non-negative");
  }
  require_positive(m_c, "m_c");

  CwModel cw;
  cw.w = w;
  cw.m_c = m_c;
  cw.A.setZero();
  cw.A.topRightCorner<3, 3>().setIdentity();
  cw.A(3, 0) = 3.0 * w * w;
  cw.A(3, 4) = 2.0 * w;
  cw.A(4, 3) = -2.0 * w;
  cw.A(5, 2) = -w * w;
  cw.B.setZero();
  cw.B.bottomRows<3>() = Mat3::Identity() / m_c;
  return cw;
}

EigenSpec::EigenSpec(const std::array<double, 6>& lambdas) : lambdas_(lambdas) {
  for (double l : lambdas_) {
    if (!std::isfinite(l) || l >= 0.0) {
      throw AssumptionViolation("desired eigenvalues must be real and strictly negative, got " +
                                std::to_string(l));
    }
  }
  for (double l : lambdas_) {
    mu_max_ = std::max(mu_max_, static_cast<int>(std::count(lambdas_.begin(), lambdas_.end(), l)));
  }
  auto by_magnitude = [](double x, double y) { return std::abs(x) < std::abs(y); };
  lambda_slow_ = *std::min_element(lambdas_.begin(), lambdas_.end(), by_magnitude);
  lambda_fast_ = *std::max_element(lambdas_.begin(), lambdas_.end(), by_magnitude);
}

GainMatrix synthesize_gains(double w, const EigenSpec& spec) {
  const auto& l = spec.lambdas();
  GainMatrix g;
  g.K(0, 0) = 3.0 * w * w + l[0] * l[1];  // k1
  g.K(0, 3) = -l[0] - l[1];              // k4
  g.K(0, 4) = 2.0 * w;                   // k5
  g.K(1, 1) = l[2] * l[3];               // k8
  g.K(1, 3) = -2.0 * w;                  // k10
  g.K(1, 4) = -l[2] - l[3];              // k11
  g.K(2, 2) = -w * w + l[4] * l[5];      // k15
  g.K(2, 5) = -l[4] - l[5];              // k18
  return g;
}

StabilizedPlant build_stabilized(const CwModel& cw, const GainMatrix& gains,
                                 const EigenSpec& spec) {
  StabilizedPlant p{.A = Mat6::Zero(),
                    .B = cw.B,
                    .gains = gains,
                    .K_eff = cw.m_c * gains.K,
                    .H = Mat63::Zero(),
                    .A_inv = Mat6::Zero(),
                    .spec = spec,
                    .m_c = cw.m_c,
                    .w = cw.w};
  p.A = cw.A - cw.B * p.K_eff;

  Eigen::FullPivLU<Mat6> lu(p.A);
  if (!lu.isInvertible()) {
    throw SynthesisFailure("stabilized state matrix is singular");
  }
  p.A_inv = lu.inverse();
  p.H = -p.A_inv * p.B;
  p.norm_A_inv = operator_norm(p.A_inv);
  p.norm_K = operator_norm(p.K_eff);
  return p;
}

StabilizedPlant build_plant(const OrbitalParams& params, const EigenSpec& spec) {
  const CwModel cw = build_cw(params);
  return build_stabilized(cw, synthesize_gains(cw.w, spec), spec);
}

bool verify_eigen_placement(const StabilizedPlant& plant, double tol) {
  if (!(tol > 0.0)) {
    throw InvalidParameter("tolerance must be positive");
  }
  Eigen::EigenSolver<Mat6> solver(plant.A, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigenvalue solver did not converge");
  }
  std::vector<std::complex<double>> computed(6);
  for (int i = 0; i < 6; ++i) computed[i] = solver.eigenvalues()(i);
  std::vector<double> desired(plant.spec.lambdas().begin(), plant.spec.lambdas().end());

  auto by_real = [](const std::complex<double>& x, const std::complex<double>& y) {
    return x.real() < y.real();
  };
  std::sort(computed.begin(), computed.end(), by_real);
  std::sort(desired.begin(), desired.end());
  for (std::size_t i = 0; i < 6; ++i) {
    if (std::abs(computed[i] - std::complex<double>(desired[i], 0.0)) > tol) return false;
  }
  return true;
}

double matrix_exp_decay_bound(const StabilizedPlant& plant, double t) {
  if (!(t >= 0.0)) {
    throw InvalidParameter("decay bound requires t >= 0");
  }
  const double slow = std::abs(plant.spec.lambda_slow());
  const double fast = std::abs(plant.spec.lambda_fast());
  return plant.spec.mu_max() * (fast / slow) * std::exp(-slow * t);
}

}  // namespace hfo
