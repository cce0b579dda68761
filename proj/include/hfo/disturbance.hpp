#pragma once

#include <memory>
#include <string>

#include "hfo/types.hpp"

namespace hfo {

/// Bounded, differentiable disturbance t -> d(t) on the measured output.
/// Implementations are stateless and safe to share across threads.
class DisturbanceModel {
 public:
  virtual ~DisturbanceModel() = default;

  /// Throws InvalidParameter for t < 0.
  Vec6 eval(double t) const;

  /// Bound on ||d(t)||.
  virtual double d_max() const = 0;
  /// Bound on ||d'(t)||, in the vector 2-norm.
  virtual double d_bar() const = 0;
  virtual std::string describe() const = 0;

 protected:
  virtual Vec6 value(double t) const = 0;
};

using DisturbancePtr = std::shared_ptr<const DisturbanceModel>;

class ZeroDisturbance final : public DisturbanceModel {
 public:
  double d_max() const override { return 0.0; }
  double d_bar() const override { return 0.0; }
  std::string describe() const override { return "zero"; }

 protected:
  Vec6 value(double) const override { return Vec6::Zero(); }
};

class ConstantDisturbance final : public DisturbanceModel {
 public:
  explicit ConstantDisturbance(const Vec6& c) : c_(c) {}
  /// c * 1_6.
  explicit ConstantDisturbance(double c) : c_(Vec6::Constant(c)) {}

  double d_max() const override { return c_.norm(); }
  double d_bar() const override { return 0.0; }
  std::string describe() const override;

 protected:
  Vec6 value(double) const override { return c_; }

 private:
  Vec6 c_;
};

/// amplitude * sin(omega t) * 1_6.
class SineDisturbance final : public DisturbanceModel {
 public:
  SineDisturbance(double amplitude, double omega);

  double amplitude() const { return amplitude_; }
  double omega() const { return omega_; }

  double d_max() const override;
  double d_bar() const override;
  /// Per-component derivative bound amplitude * omega; smaller than d_bar()
  /// by sqrt(6).
  double d_bar_per_component() const;
  std::string describe() const override;

 protected:
  Vec6 value(double t) const override;

 private:
  double amplitude_;
  double omega_;
};

double derivative_bound(const DisturbanceModel& model);

DisturbancePtr make_zero_disturbance();
DisturbancePtr make_constant_disturbance(double c);
DisturbancePtr make_sine_disturbance(double amplitude, double omega);

}  // namespace hfo
