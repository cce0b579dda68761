#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hfo/disturbance.hpp"
#include "hfo/errors.hpp"

using namespace hfo;

TEST(Disturbance, SineValues) {
  const auto d = make_sine_disturbance(5.0, 1.0);
  EXPECT_EQ(d->eval(0.0), Vec6::Zero());
  EXPECT_LE((d->eval(std::numbers::pi / 2) - Vec6::Constant(5.0)).norm(), 1e-14);
  EXPECT_NEAR(d->d_max(), 5.0 * std::sqrt(6.0), 1e-14);
  EXPECT_NEAR(derivative_bound(*d), 12.247, 1e-3);
  EXPECT_NEAR(derivative_bound(*d), 5.0 * std::sqrt(6.0), 1e-14);
  EXPECT_DOUBLE_EQ(std::dynamic_pointer_cast<const SineDisturbance>(d)->d_bar_per_component(),
                   5.0);
}

TEST(Disturbance, ZeroAndConstant) {
  const auto z = make_zero_disturbance();
  EXPECT_EQ(z->eval(123.0), Vec6::Zero());
  EXPECT_EQ(derivative_bound(*z), 0.0);
  const auto c = make_constant_disturbance(2.0);
  EXPECT_EQ(c->eval(9.0), Vec6::Constant(2.0));
  EXPECT_EQ(derivative_bound(*c), 0.0);
  EXPECT_NEAR(c->d_max(), 2.0 * std::sqrt(6.0), 1e-14);
}

TEST(Disturbance, NegativeTimeRejected) {
  EXPECT_THROW(make_sine_disturbance(5.0, 1.0)->eval(-1e-9), InvalidParameter);
  EXPECT_THROW(make_zero_disturbance()->eval(-1.0), InvalidParameter);
}

TEST(Disturbance, DeclaredBoundsHoldOnDenseGrid) {
  const std::vector<DisturbancePtr> models{
      make_zero_disturbance(), make_constant_disturbance(-3.0), make_sine_disturbance(5.0, 1.0),
      make_sine_disturbance(0.7, 13.0), make_sine_disturbance(-2.0, 0.01)};
  const double h = 1e-5;
  for (const auto& m : models) {
    for (int i = 0; i < 10000; ++i) {
      const double t = h + i * 0.0731;
      const Vec6 fd = (m->eval(t + h) - m->eval(t - h)) / (2.0 * h);
      EXPECT_LE(fd.norm(), m->d_bar() * (1.0 + 1e-6) + 1e-9) << m->describe() << " t=" << t;
      EXPECT_LE(m->eval(t).norm(), m->d_max() * (1.0 + 1e-15)) << m->describe();
    }
  }
}
