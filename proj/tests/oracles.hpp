#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "hfo/analysis.hpp"
#include "hfo/experiments.hpp"

namespace oracle {

using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

// Taylor series with scaling and squaring, in long double.
inline Eigen::MatrixXd expm_taylor(const Eigen::MatrixXd& a) {
  const MatL al = a.cast<long double>();
  const long double norm = al.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  while (std::ldexp(norm, -s) > 0.25L) ++s;
  const MatL scaled = al * std::ldexp(1.0L, -s);
  const auto n = a.rows();
  MatL sum = MatL::Identity(n, n);
  MatL term = MatL::Identity(n, n);
  for (int k = 1; k < 40; ++k) {
    term = term * scaled / static_cast<long double>(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum.cast<double>();
}

// x(dt) for constant u and no disturbance:
// exp(A dt) x0 + (exp(A dt) - I) A^{-1} B u.
inline hfo::Vec6 constant_input_flow(const hfo::StabilizedPlant& p, const hfo::Vec6& x0,
                                     const hfo::Vec3& u, double dt) {
  const Eigen::MatrixXd E = expm_taylor(p.A * dt);
  const hfo::Mat6 Em = E;
  return Em * x0 + (Em - hfo::Mat6::Identity()) * p.A.fullPivLu().solve(p.B * u);
}

// Exact flow under d(t) = amp sin(omega t) 1_6 through an augmented linear
// system whose last two states generate sin and cos.
inline hfo::Vec6 sine_flow(const hfo::StabilizedPlant& p, const hfo::Vec6& x0,
                           const hfo::Vec3& u, double amp, double omega, double t0, double dt) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(11, 11);
  M.topLeftCorner(6, 6) = p.A;
  M.block(0, 6, 6, 3) = p.B;
  M.block(0, 9, 6, 1) = -(p.B * p.K_eff) * hfo::Vec6::Constant(amp);
  M(9, 10) = omega;
  M(10, 9) = -omega;
  Eigen::VectorXd z(11);
  z << x0, u, std::sin(omega * t0), std::cos(omega * t0);
  const Eigen::VectorXd out = expm_taylor(M * dt) * z;
  return out.head<6>();
}

// Envelope evaluated term by term in long double.
inline long double envelope(long double t, const hfo::BoundParams& p, long double init_err,
                            long double tau_factor) {
  const long double mu = p.mu_max, l1 = p.lam_slow, l6 = p.lam_fast, m = p.m_c;
  const long double pre = mu * l6 / (m * l1 * l1);
  long double v = mu * (l6 / l1) * std::exp(-l1 * t) * init_err;
  v += pre * p.d_U *
       (2.0L - std::exp(-tau_factor * l1 * static_cast<long double>(p.tau_c_max)) -
        std::exp(-l1 * t));
  v += pre * std::pow(static_cast<long double>(p.q), p.ell / 2.0L) * p.d_U *
       (1.0L - std::exp(l1 * static_cast<long double>(p.tau_c_min)) * std::exp(-l1 * t));
  v += pre * static_cast<long double>(p.norm_A_inv) * p.norm_K * p.d_bar *
       (1.0L + (mu * l6 * t - 1.0L) * std::exp(-l1 * t));
  return v;
}

// Central difference gradient of u -> Phi(u, H u + d).
inline hfo::Vec3 fd_gradient(const hfo::QuadObjective& obj, const hfo::Mat63& H,
                             const hfo::Vec3& u, const hfo::Vec6& d, double h) {
  hfo::Vec3 g;
  for (int i = 0; i < 3; ++i) {
    hfo::Vec3 up = u, dn = u;
    up(i) += h;
    dn(i) -= h;
    g(i) = (hfo::eval_phi(obj, up, H * up + d) - hfo::eval_phi(obj, dn, H * dn + d)) / (2.0 * h);
  }
  return g;
}

// Normal-equation least squares for the six-term quadratic surface.
inline std::array<double, 6> normal_equation_fit(const std::vector<hfo::ResponseSample>& s) {
  Eigen::MatrixXd X(s.size(), 6);
  Eigen::VectorXd y(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double k = s[i].kappa, th = s[i].theta;
    X.row(static_cast<Eigen::Index>(i)) << 1, k, th, k * k, th * th, k * th;
    y(static_cast<Eigen::Index>(i)) = s[i].err;
  }
  const Eigen::VectorXd c = (X.transpose() * X).ldlt().solve(X.transpose() * y);
  std::array<double, 6> out{};
  for (int i = 0; i < 6; ++i) out[i] = c(i);
  return out;
}

// Eigenvalue specs with pairs kept apart so that no block is defective.
inline std::array<double, 6> random_spec(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(0.005, 0.5);
  std::array<double, 6> l{};
  for (int pair = 0; pair < 3; ++pair) {
    const double a = mag(rng);
    const double b = a * std::uniform_real_distribution<double>(1.2, 3.0)(rng);
    l[2 * pair] = -a;
    l[2 * pair + 1] = -b;
  }
  return l;
}

}  // namespace oracle
