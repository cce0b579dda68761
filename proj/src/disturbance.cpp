#include "hfo/disturbance.hpp"

#include <cmath>
#include <sstream>

#include "hfo/errors.hpp"

namespace hfo {

namespace {
const double kSqrt6 = std::sqrt(6.0);
}

Vec6 DisturbanceModel::eval(double t) const {
  if (!(t >= 0.0)) {
    throw InvalidParameter("disturbance evaluated at negative time");
  }
  return value(t);
}

std::string ConstantDisturbance::describe() const {
  std::ostringstream os;
  os << "constant(" << c_.transpose() << ")";
  return os.str();
}

SineDisturbance::SineDisturbance(double amplitude, double omega)
    : amplitude_(amplitude), omega_(omega) {
  if (!std::isfinite(amplitude) || !std::isfinite(omega)) {
    throw InvalidParameter("sine disturbance parameters must be finite");
  }
}

double SineDisturbance::d_max() const { return std::abs(amplitude_) * kSqrt6; }

double SineDisturbance::d_bar() const { return std::abs(amplitude_ * omega_) * kSqrt6; }

double SineDisturbance::d_bar_per_component() const { return std::abs(amplitude_ * omega_); }

std::string SineDisturbance::describe() const {
  std::ostringstream os;
  os << "sine(amplitude=" << amplitude_ << ", omega=" << omega_ << ")";
  return os.str();
}

Vec6 SineDisturbance::value(double t) const {
  return Vec6::Constant(amplitude_ * std::sin(omega_ * t));
}

double derivative_bound(const DisturbanceModel& model) { return model.d_bar(); }

DisturbancePtr make_zero_disturbance() { return std::make_shared<ZeroDisturbance>(); }

DisturbancePtr make_constant_disturbance(double c) {
  return std::make_shared<ConstantDisturbance>(c);
}

DisturbancePtr make_sine_disturbance(double amplitude, double omega) {
  return std::make_shared<SineDisturbance>(amplitude, omega);
}

}  // namespace hfo
