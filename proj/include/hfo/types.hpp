#pragma once

#include <Eigen/Dense>

namespace hfo {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat63 = Eigen::Matrix<double, 6, 3>;
using Mat36 = Eigen::Matrix<double, 3, 6>;

/// Largest singular value.
template <typename Derived>
double operator_norm(const Eigen::MatrixBase<Derived>& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m.eval());
  return svd.singularValues()(0);
}

/// Execution path for kernels that have both a serial reference and an
/// OpenMP implementation. Both paths produce identical results.
enum class Exec { Serial, Parallel };

}  // namespace hfo
