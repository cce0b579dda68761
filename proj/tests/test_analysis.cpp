#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "hfo/analysis.hpp"
#include "hfo/errors.hpp"
#include "oracles.hpp"

using namespace hfo;

namespace {

BoundParams admissible_params() { return make_bound_params(build_model(fixture::admissible())); }

BoundParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BoundParams p;
  p.mu_max = 1 + static_cast<int>(u(rng) * 3);
  p.lam_slow = 0.005 + 0.1 * u(rng);
  p.lam_fast = p.lam_slow * (1.0 + 3.0 * u(rng));
  p.d_U = 2.0 * u(rng);
  p.m_c = std::pow(10.0, 4.0 * u(rng));
  p.q = 0.05 + 0.9 * u(rng);
  p.ell = 1 + static_cast<int>(u(rng) * 5);
  p.d_bar = 20.0 * u(rng);
  p.norm_A_inv = 1e3 * u(rng);
  p.norm_K = 1e-3 * u(rng) * p.m_c;
  p.tau_c_min = 0.5 + u(rng);
  p.tau_c_max = p.tau_c_min * (1.0 + u(rng));
  return p;
}

HybridTrajectory constant_arc(const Vec6& x, double t_end, double dt, int j = 0) {
  HybridTrajectory tr;
  for (double t = 0.0; t <= t_end + 1e-12; t += dt) {
    TrajectorySample s;
    s.t = t;
    s.j = j;
    s.state.x = x;
    tr.samples.push_back(s);
  }
  return tr;
}

}  // namespace

TEST(Bounds, MuMax) {
  EXPECT_EQ(mu_max(EigenSpec(fixture::reference().eigenvalues)), 2);
  EXPECT_EQ(mu_max(EigenSpec({-1, -2, -3, -4, -5, -6})), 1);
  EXPECT_EQ(mu_max(EigenSpec({-1, -1, -1, -4, -5, -6})), 3);
  EXPECT_EQ(mu_max(EigenSpec({-1, -1, -1, -1, -1, -1})), 6);
}

TEST(Bounds, ParamsFromModel) {
  const BoundParams p = admissible_params();
  EXPECT_NO_THROW(p.validate());
  EXPECT_EQ(p.ell, 3);
  EXPECT_DOUBLE_EQ(p.lam_slow, 0.0155);
  EXPECT_DOUBLE_EQ(p.lam_fast, 0.0170);
  EXPECT_NEAR(p.d_U, 0.8 * std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(p.d_bar, 5.0 * std::sqrt(6.0), 1e-12);
  EXPECT_GT(p.q, 0.0);
  EXPECT_LT(p.q, 1.0);
  EXPECT_THROW(make_bound_params(build_model(fixture::reference())).validate(), InvalidParameter);
}

TEST(Bounds, MatchLongDoubleOracle) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const BoundParams p = random_params(rng);
    for (double t : {0.0, 0.3, 1.0, 10.0, 100.0, 1000.0, 5000.0}) {
      const double e0 = 100.0 * static_cast<double>(i % 7);
      const long double pr = oracle::envelope(t, p, e0, 1.0L);
      const long double th = oracle::envelope(t, p, e0, 2.0L);
      const double scale = std::max(1.0, static_cast<double>(std::abs(th)));
      ASSERT_NEAR(prop_bound(t, p, e0), static_cast<double>(pr), 1e-12 * scale);
      ASSERT_NEAR(thm_bound(t, p, e0), static_cast<double>(th), 1e-12 * scale);
    }
  }
}

TEST(Bounds, ConvergeToAsymptotes) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 200; ++i) {
    const BoundParams p = random_params(rng);
    const double t = 60.0 / p.lam_slow;
    EXPECT_NEAR(prop_bound(t, p, 1e3), prop_asymptote(p), 1e-9 * std::max(1.0, prop_asymptote(p)));
    EXPECT_NEAR(thm_bound(t, p, 1e3), thm_asymptote(p), 1e-9 * std::max(1.0, thm_asymptote(p)));
    EXPECT_GE(thm_asymptote(p), prop_asymptote(p));
  }
}

TEST(Bounds, OrderingAndMonotonicity) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const BoundParams p = random_params(rng);
    for (double t : {0.0, 2.0, 50.0, 400.0}) {
      EXPECT_GE(thm_bound(t, p, 10.0), prop_bound(t, p, 10.0));
      EXPECT_GE(thm_bound(t, p, 20.0), thm_bound(t, p, 10.0));
    }
    EXPECT_GT(thm_bound(0.0, p, 20.0), thm_bound(0.0, p, 10.0));
    BoundParams worse = p;
    worse.d_bar *= 2.0;
    worse.d_bar += 1.0;
    EXPECT_GT(thm_asymptote(worse), thm_asymptote(p));
    worse = p;
    worse.m_c *= 10.0;
    worse.norm_K *= 10.0;  // K_eff scales with the mass
    EXPECT_LT(thm_asymptote(worse), thm_asymptote(p) + 1e-12 * thm_asymptote(p));
  }
}

TEST(Bounds, ValidateRejects) {
  BoundParams p = admissible_params();
  p.q = 1.0;
  EXPECT_THROW(p.validate(), InvalidParameter);
  p = admissible_params();
  p.lam_slow = 0.0;
  EXPECT_THROW(p.validate(), InvalidParameter);
  p = admissible_params();
  p.tau_c_max = 0.5 * p.tau_c_min;
  EXPECT_THROW(p.validate(), InvalidParameter);
}

TEST(Envelope, NegativeControlFlagsEverySample) {
  const BoundParams p = admissible_params();
  ErrorSeries series;
  for (int i = 0; i <= 100; ++i) {
    const double t = 10.0 * i;
    series.points.push_back({t, 0, thm_bound(t, p, 1.0) * 1.5 + 1.0, Vec6::Zero()});
  }
  const EnvelopeReport r = check_envelope(series, p, 1.0);
  EXPECT_EQ(r.violations, series.points.size());
  EXPECT_FALSE(r.holds());
  EXPECT_LT(r.min_margin, 0.0);
}

TEST(Envelope, ZeroErrorHolds) {
  const BoundParams p = admissible_params();
  ErrorSeries series;
  for (int i = 0; i <= 1000; ++i) series.points.push_back({0.5 * i, 0, 0.0, Vec6::Zero()});
  const EnvelopeReport r = check_envelope(series, p, 100.0);
  EXPECT_TRUE(r.holds());
  ASSERT_EQ(r.margins.size(), series.points.size());
  for (std::size_t i = 0; i < r.margins.size(); ++i) {
    EXPECT_DOUBLE_EQ(r.margins[i], r.thm[i]);
  }
}

TEST(Envelope, PerSampleInitErrorUsesRendezvousPoint) {
  const BoundParams p = admissible_params();
  ErrorSeries series;
  Vec6 xt = Vec6::Zero();
  for (int i = 0; i <= 10; ++i) {
    xt(0) = 10.0 * i;
    series.points.push_back({1.0 * i, 0, 0.0, xt});
  }
  const Vec6 x0 = Vec6::Constant(3.0);
  const EnvelopeReport per = check_envelope(series, p, x0, InitErrMode::PerSample, Exec::Serial);
  const EnvelopeReport frozen = check_envelope(series, p, x0, InitErrMode::Frozen, Exec::Serial);
  for (std::size_t i = 0; i < series.points.size(); ++i) {
    const double t = series.points[i].t;
    EXPECT_DOUBLE_EQ(per.thm[i], thm_bound(t, p, (x0 - series.points[i].x_tilde).norm()));
    EXPECT_DOUBLE_EQ(frozen.thm[i], thm_bound(t, p, (x0 - series.points[0].x_tilde).norm()));
    EXPECT_DOUBLE_EQ(per.prop[i], prop_bound(t, p, (x0 - series.points[i].x_tilde).norm()));
  }
}

TEST(Error, ZeroAtRendezvousPointAndOffsetElsewhere) {
  const auto cfg = fixture::reference();
  const HybridModel m = build_model(cfg);
  const auto d = make_constant_disturbance(1.5);
  const Vec6 xt = chosen_rendezvous_point(m.objective, m.plant, d->eval(0.0), 1e-12);
  const Vec6 off = (Vec6() << 3, 4, 0, 0, 0, 0).finished();
  const ErrorSeries at = rendezvous_error(constant_arc(xt, 5.0, 0.5), m.objective, m.plant, *d,
                                          1e-12, Exec::Serial);
  const ErrorSeries away = rendezvous_error(constant_arc(xt + off, 5.0, 0.5), m.objective,
                                            m.plant, *d, 1e-12, Exec::Serial);
  for (const auto& pt : at.points) EXPECT_LE(pt.err, 1e-6);
  for (const auto& pt : away.points) EXPECT_NEAR(pt.err, 5.0, 1e-6);
}

TEST(Error, SerialAndParallelAgreeBitwise) {
  const auto cfg = fixture::reference();
  const HybridModel m = build_model(cfg);
  const HybridTrajectory tr = simulate(cfg.init, 400.0, m, 0.25);
  const auto a = rendezvous_error(tr, m.objective, m.plant, *m.disturbance, 1e-10, Exec::Serial);
  const auto b = rendezvous_error(tr, m.objective, m.plant, *m.disturbance, 1e-10,
                                  Exec::Parallel);
  ASSERT_EQ(a.points.size(), b.points.size());
  ASSERT_GT(a.points.size(), 1000u);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    ASSERT_EQ(a.points[i].err, b.points[i].err);
    ASSERT_EQ(a.points[i].x_tilde, b.points[i].x_tilde);
  }
  const BoundParams p = make_bound_params(m);
  const auto ea = check_envelope(a, p, cfg.init.x, InitErrMode::PerSample, Exec::Serial);
  const auto eb = check_envelope(a, p, cfg.init.x, InitErrMode::PerSample, Exec::Parallel);
  EXPECT_EQ(ea.margins, eb.margins);
  EXPECT_EQ(ea.violations, eb.violations);
}

TEST(Error, AsymptoticWindow) {
  ErrorSeries s;
  for (int i = 0; i <= 300; ++i) s.points.push_back({0.1 * i, 0, std::sin(0.1 * i) + 0.01 * i});
  const double t1 = s.points.back().t;
  double expect = 0.0;
  for (const auto& pt : s.points) {
    if (pt.t >= t1 - 10.0) expect = std::max(expect, pt.err);
  }
  EXPECT_DOUBLE_EQ(asymptotic_error(s, 10.0), expect);
  EXPECT_THROW(asymptotic_error(s, 16.0), InsufficientData);
  EXPECT_THROW(asymptotic_error(ErrorSeries{}, 1.0), InsufficientData);
  EXPECT_THROW(asymptotic_error(s, 0.0), InvalidParameter);
}

TEST(InputGap, AdmissibleRunStaysWithinContractionBound) {
  const auto cfg = fixture::admissible();
  const HybridModel m = build_model(cfg);
  const HybridTrajectory tr = simulate(cfg.init, 200.0, m, 0.5);
  const BoundParams p = make_bound_params(m);
  const InputGapReport r = input_gap_check(tr, m.objective, m.plant, p);
  int g2 = 0;
  for (const auto& j : tr.jumps) g2 += j.map == JumpMap::G2;
  EXPECT_EQ(static_cast<int>(r.epochs.size()), g2);
  EXPECT_TRUE(r.holds());
  for (std::size_t k = 1; k < r.epochs.size(); ++k) {
    EXPECT_GE(r.epochs[k].alpha, p.ell);
    EXPECT_NEAR(r.epochs[k].bound, std::pow(p.q, 0.5 * r.epochs[k].alpha) * p.d_U, 1e-8);
  }
}

TEST(EigenSelection, SufficientConditionImpliesAsymptote) {
  std::mt19937_64 rng(8);
  const BoundParams base = admissible_params();
  for (int i = 0; i < 2000; ++i) {
    const auto spec = EigenSpec(oracle::random_spec(rng));
    const double eta = std::pow(10.0, -4.0 + 6.0 * std::uniform_real_distribution<>(0, 1)(rng));
    const EigenSelectionResult r = eigenvalue_selection_check(spec, eta, base);
    if (r.holds()) {
      ASSERT_LE(r.asymptote_bound, eta * (1.0 + 1e-12));
    }
    const EigenSelectionResult looser = eigenvalue_selection_check(spec, 2.0 * eta, base);
    ASSERT_LT(looser.required_lam_fast, r.required_lam_fast);
    ASSERT_LT(looser.required_lam_slow, r.required_lam_slow);
    ASSERT_EQ(looser.asymptote_bound, r.asymptote_bound);
  }
  EXPECT_THROW(eigenvalue_selection_check(EigenSpec(fixture::reference().eigenvalues), 0.0, base),
               InvalidParameter);
}

TEST(Closeness, IdenticalArcsAreZeroClose) {
  const auto cfg = fixture::reference();
  const HybridModel m = build_model(cfg);
  const HybridTrajectory tr = simulate(cfg.init, 20.0, m, 0.5);
  EXPECT_EQ(tau_eps_closeness(tr, tr, 20.0), 0.0);
}

TEST(Closeness, ConstantOffset) {
  const Vec6 x = Vec6::Constant(1.0);
  const auto a = constant_arc(x, 10.0, 1.0);
  const auto b = constant_arc(x + Vec6::Unit(2) * 0.3, 10.0, 1.0);
  EXPECT_NEAR(tau_eps_closeness(a, b, 10.0), 0.3, 1e-12);
  EXPECT_NEAR(tau_eps_closeness(b, a, 10.0), 0.3, 1e-12);
}

TEST(Closeness, TimeShiftIsCapturedByHorizontalSlack) {
  // x(t) = t in one component, b lags a by 0.05 s.
  HybridTrajectory a, b;
  for (int i = 0; i <= 1000; ++i) {
    TrajectorySample s;
    s.t = 0.01 * i;
    s.state.x(0) = s.t;
    a.samples.push_back(s);
    s.state.x(0) = std::max(0.0, s.t - 0.05);
    b.samples.push_back(s);
  }
  const double eps = tau_eps_closeness(a, b, 9.0);
  EXPECT_LE(eps, 0.05 + 2e-3);
  EXPECT_GE(eps, 0.025 - 2e-3);
}

TEST(Closeness, NonDecreasingInTau) {
  auto cfg = fixture::reference();
  HybridModel ma = build_model(cfg);
  ma.timers.reset_policy = ResetPolicy::UniformRandom;
  ma.timers.seed = 1;
  HybridModel mb = ma;
  mb.timers.seed = 2;
  const auto a = simulate(cfg.init, 30.0, ma, 0.5);
  const auto b = simulate(cfg.init, 30.0, mb, 0.5);
  double prev = 0.0;
  for (double tau : {1.0, 5.0, 10.0, 20.0, 30.0}) {
    const double e = tau_eps_closeness(a, b, tau, 1e-2);
    EXPECT_GE(e, prev);
    prev = e;
  }
}

TEST(Closeness, Errors) {
  const auto a = constant_arc(Vec6::Zero(), 5.0, 1.0);
  EXPECT_THROW(tau_eps_closeness(a, a, 6.0), InsufficientData);
  EXPECT_THROW(tau_eps_closeness(a, a, 1.0, 0.0), InvalidParameter);
  // a has no j = 2 segment.
  auto c = constant_arc(Vec6::Zero(), 5.0, 1.0, 2);
  EXPECT_TRUE(std::isinf(tau_eps_closeness(c, a, 3.0)));
}

TEST(Fit, ConstantAndExactQuadratic) {
  std::vector<ResponseSample> flat, quad;
  const std::array<double, 6> c{0.3, -1.2, 0.5, 2.0, -0.7, 1.1};
  for (double k : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    for (double th : {-0.25, 0.5, 1.0}) {
      flat.push_back({k, th, 4.2});
      const double v = c[0] + c[1] * k + c[2] * th + c[3] * k * k + c[4] * th * th + c[5] * k * th;
      quad.push_back({k, th, v});
    }
  }
  const QuadraticFit f0 = fit_quadratic_response(flat);
  EXPECT_NEAR(f0.coefficients[0], 4.2, 1e-12);
  for (int i = 1; i < 6; ++i) EXPECT_NEAR(f0.coefficients[i], 0.0, 1e-11);
  EXPECT_LE(f0.max_abs_residual, 1e-12);

  const QuadraticFit f1 = fit_quadratic_response(quad);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(f1.coefficients[i], c[i], 1e-11);
  EXPECT_NEAR(f1.r_squared, 1.0, 1e-12);
}

TEST(Fit, MatchesNormalEquationsOnNoisyData) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<ResponseSample> s;
    for (int i = 0; i < 40; ++i) {
      const double k = u(rng), th = u(rng);
      s.push_back({k, th, 1.0 + k - th * th + noise(rng)});
    }
    const auto ref = oracle::normal_equation_fit(s);
    const QuadraticFit f = fit_quadratic_response(s);
    for (int i = 0; i < 6; ++i) ASSERT_NEAR(f.coefficients[i], ref[i], 1e-9);
    ASSERT_GE(f.r_squared, 0.0);
    ASSERT_LE(f.r_squared, 1.0);
  }
}

TEST(Fit, RejectsDegenerateDesigns) {
  std::vector<ResponseSample> few(5, ResponseSample{0.1, 0.2, 1.0});
  EXPECT_THROW(fit_quadratic_response(few), RegressionError);
  std::vector<ResponseSample> line;
  for (double k : {0.1, 0.3, 0.5, 0.7, 0.9, 1.1, 1.3}) line.push_back({k, 0.5, k});
  EXPECT_THROW(fit_quadratic_response(line), RegressionError);
}
