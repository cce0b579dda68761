#include "hfo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "hfo/errors.hpp"

namespace hfo {

namespace {

constexpr std::size_t kWarmStartChunk = 256;

double envelope(double t, const BoundParams& p, double init_err, double tau_c_max_factor) {
  const double mu = p.mu_max;
  const double c = mu * p.lam_fast / (p.m_c * p.lam_slow * p.lam_slow);
  const double e = std::exp(-p.lam_slow * t);
  const double decay = mu * (p.lam_fast / p.lam_slow) * e * init_err;
  const double box = c * p.d_U * (2.0 - std::exp(-tau_c_max_factor * p.lam_slow * p.tau_c_max) - e);
  const double optimizer = c * std::pow(p.q, 0.5 * p.ell) * p.d_U *
                           (1.0 - std::exp(p.lam_slow * (p.tau_c_min - t)));
  const double drift =
      c * p.norm_A_inv * p.norm_K * p.d_bar * (1.0 + (mu * p.lam_fast * t - 1.0) * e);
  return decay + box + optimizer + drift;
}

double asymptote(const BoundParams& p, double tau_c_max_factor) {
  const double c = p.mu_max * p.lam_fast / (p.m_c * p.lam_slow * p.lam_slow);
  return c * (2.0 * p.d_U - p.d_U * std::exp(-tau_c_max_factor * p.lam_slow * p.tau_c_max) +
              p.d_U * std::pow(p.q, 0.5 * p.ell) + p.norm_A_inv * p.norm_K * p.d_bar);
}

EnvelopeReport envelope_report(const ErrorSeries& series, const BoundParams& p,
                               const std::vector<double>& init_err, Exec exec) {
  const std::size_t n = series.points.size();
  EnvelopeReport r;
  r.prop.resize(n);
  r.thm.resize(n);
  r.margins.resize(n);
  const auto body = [&](std::size_t i) {
    const auto& pt = series.points[i];
    r.prop[i] = prop_bound(pt.t, p, init_err[i]);
    r.thm[i] = thm_bound(pt.t, p, init_err[i]);
    r.margins[i] = r.thm[i] - pt.err;
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) body(i);
  } else {
    for (std::size_t i = 0; i < n; ++i) body(i);
  }
  for (double m : r.margins) {
    if (!(m >= 0.0)) ++r.violations;
    r.min_margin = std::min(r.min_margin, m);
  }
  return r;
}

struct GridPoint {
  double t;
  Vec21 v;
};

using Segments = std::map<int, std::vector<GridPoint>>;

// Resamples every constant-j stretch of an arc on t0 + k h plus its end
// point, interpolating linearly between recorded samples.
Segments resample(const HybridTrajectory& traj, double h) {
  std::map<int, std::vector<GridPoint>> raw;
  for (const auto& s : traj.samples) raw[s.j].push_back({s.t, s.state.to_vector()});

  Segments out;
  for (auto& [j, pts] : raw) {
    auto& seg = out[j];
    const double t0 = pts.front().t;
    const double t1 = pts.back().t;
    const auto count = static_cast<long>(std::floor((t1 - t0) / h));
    std::size_t k = 0;
    for (long i = 0; i <= count; ++i) {
      const double t = t0 + static_cast<double>(i) * h;
      while (k + 1 < pts.size() && pts[k + 1].t < t) ++k;
      if (k + 1 >= pts.size() || pts[k + 1].t == pts[k].t) {
        seg.push_back({t, pts[k].v});
        continue;
      }
      const double w = (t - pts[k].t) / (pts[k + 1].t - pts[k].t);
      seg.push_back({t, (1.0 - w) * pts[k].v + w * pts[k + 1].v});
    }
    if (seg.back().t < t1) seg.push_back({t1, pts.back().v});
  }
  return out;
}

// sup over points of `from` with t + j <= tau of
// inf over same-j points of `to` of max(|t - s|, ||from - to||).
double directed_closeness(const Segments& from, const Segments& to, double tau) {
  std::vector<std::pair<const std::vector<GridPoint>*, const std::vector<GridPoint>*>> work;
  std::vector<int> js;
  for (const auto& [j, seg] : from) {
    if (seg.front().t + j > tau) continue;
    auto it = to.find(j);
    if (it == to.end()) return std::numeric_limits<double>::infinity();
    work.emplace_back(&seg, &it->second);
    js.push_back(j);
  }

  double result = 0.0;
  const long n = static_cast<long>(work.size());
#pragma omp parallel for schedule(dynamic) reduction(max : result)
  for (long w = 0; w < n; ++w) {
    const auto& seg_a = *work[w].first;
    const auto& seg_b = *work[w].second;
    const double t_lim = tau - js[w];
    for (const auto& pa : seg_a) {
      if (pa.t > t_lim) break;
      auto mid = std::lower_bound(seg_b.begin(), seg_b.end(), pa.t,
                                  [](const GridPoint& g, double t) { return g.t < t; });
      double best = std::numeric_limits<double>::infinity();
      for (auto it = mid; it != seg_b.end(); ++it) {
        const double dt = std::abs(it->t - pa.t);
        if (dt >= best) break;
        best = std::min(best, std::max(dt, (it->v - pa.v).norm()));
      }
      for (auto it = mid; it != seg_b.begin();) {
        --it;
        const double dt = std::abs(it->t - pa.t);
        if (dt >= best) break;
        best = std::min(best, std::max(dt, (it->v - pa.v).norm()));
      }
      result = std::max(result, best);
    }
  }
  return result;
}

}  // namespace

void BoundParams::validate() const {
  const bool ok = mu_max >= 1 && lam_slow > 0.0 && lam_fast >= lam_slow && d_U >= 0.0 &&
                  m_c > 0.0 && q > 0.0 && q < 1.0 && ell >= 1 && d_bar >= 0.0 &&
                  norm_A_inv >= 0.0 && norm_K >= 0.0 && tau_c_min > 0.0 &&
                  tau_c_max >= tau_c_min;
  if (!ok) {
    throw InvalidParameter("bound parameters violate their invariants (q = " + std::to_string(q) +
                           ")");
  }
}

BoundParams make_bound_params(const HybridModel& model) {
  const auto& spec = model.plant.spec;
  BoundParams p;
  p.mu_max = spec.mu_max();
  p.lam_slow = std::abs(spec.lambda_slow());
  p.lam_fast = std::abs(spec.lambda_fast());
  p.d_U = model.objective.box.diameter();
  p.m_c = model.plant.m_c;
  p.q = evaluate_constants(model.objective, model.plant.H).q;
  p.ell = assumption2_ell(model.timers);
  p.d_bar = model.disturbance->d_bar();
  p.norm_A_inv = model.plant.norm_A_inv;
  p.norm_K = model.plant.norm_K;
  p.tau_c_min = model.timers.tau_c_min;
  p.tau_c_max = model.timers.tau_c_max;
  return p;
}

int mu_max(const EigenSpec& spec) { return spec.mu_max(); }

ErrorSeries rendezvous_error(const HybridTrajectory& traj, const QuadObjective& obj,
                             const StabilizedPlant& plant, const DisturbanceModel& dist,
                             double tol, Exec exec) {
  const std::size_t n = traj.samples.size();
  ErrorSeries series;
  series.points.resize(n);
  const SolverOptions opts{.tol = tol};
  const std::size_t chunks = (n + kWarmStartChunk - 1) / kWarmStartChunk;

  // Warm starts run within fixed-size chunks so the result does not depend
  // on the thread count.
  const auto chunk_body = [&](std::size_t c) {
    std::optional<Vec3> warm;
    const std::size_t end = std::min(n, (c + 1) * kWarmStartChunk);
    for (std::size_t i = c * kWarmStartChunk; i < end; ++i) {
      const auto& s = traj.samples[i];
      const Vec6 d = dist.eval(s.t);
      const Vec3 u_opt = solve_optimal_input(obj, plant.H, d, opts, warm);
      warm = u_opt;
      const Vec6 x_tilde = rendezvous_point_from_input(plant, u_opt, d);
      series.points[i] = {s.t, s.j, (s.state.x - x_tilde).norm(), x_tilde};
    }
  };

  if (exec == Exec::Parallel) {
    std::string failure;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t c = 0; c < chunks; ++c) {
      try {
        chunk_body(c);
      } catch (const std::exception& e) {
#pragma omp critical
        if (failure.empty()) failure = e.what();
      }
    }
    if (!failure.empty()) throw NonConvergence(failure);
  } else {
    for (std::size_t c = 0; c < chunks; ++c) chunk_body(c);
  }
  return series;
}

double asymptotic_error(const ErrorSeries& series, double window) {
  if (!(window > 0.0)) {
    throw InvalidParameter("asymptotic window must be positive");
  }
  if (series.points.empty()) {
    throw InsufficientData("empty error series");
  }
  const double t0 = series.points.front().t;
  const double t1 = series.points.back().t;
  if (t1 - t0 < 2.0 * window) {
    throw InsufficientData("error series spans " + std::to_string(t1 - t0) +
                           " s, needs at least " + std::to_string(2.0 * window) + " s");
  }
  double sup = 0.0;
  for (const auto& pt : series.points) {
    if (pt.t >= t1 - window) sup = std::max(sup, pt.err);
  }
  return sup;
}

double prop_bound(double t, const BoundParams& p, double init_err) {
  return envelope(t, p, init_err, 1.0);
}

double prop_asymptote(const BoundParams& p) { return asymptote(p, 1.0); }

double thm_bound(double t, const BoundParams& p, double init_err) {
  return envelope(t, p, init_err, 2.0);
}

double thm_asymptote(const BoundParams& p) { return asymptote(p, 2.0); }

EnvelopeReport check_envelope(const ErrorSeries& series, const BoundParams& p, const Vec6& x0,
                              InitErrMode mode, Exec exec) {
  std::vector<double> init_err(series.points.size());
  if (!series.points.empty()) {
    const double frozen = (x0 - series.points.front().x_tilde).norm();
    for (std::size_t i = 0; i < init_err.size(); ++i) {
      init_err[i] = mode == InitErrMode::Frozen ? frozen
                                                : (x0 - series.points[i].x_tilde).norm();
    }
  }
  return envelope_report(series, p, init_err, exec);
}

EnvelopeReport check_envelope(const ErrorSeries& series, const BoundParams& p, double init_err,
                              Exec exec) {
  return envelope_report(series, p, std::vector<double>(series.points.size(), init_err), exec);
}

InputGapReport input_gap_check(const HybridTrajectory& traj, const QuadObjective& obj,
                               const StabilizedPlant& plant, const BoundParams& p,
                               double slack) {
  InputGapReport report;
  if (traj.samples.empty()) return report;
  const SolverOptions opts{.tol = 1e-12};
  Vec6 y_s = traj.samples.front().state.y_s;
  int alpha = 0;
  for (const auto& s : traj.samples) {
    if (!s.jump_case) continue;
    const JumpRecord& rec = traj.jumps.at(static_cast<std::size_t>(s.j - 1));
    if (rec.map == JumpMap::G1) {
      ++alpha;
      continue;
    }
    const Vec3 z_star = solve_frozen_sample_optimum(obj, plant.H, y_s, opts);
    InputGapEpoch e;
    e.t = s.t;
    e.alpha = alpha;
    e.gap = (s.state.u - z_star).norm();
    e.bound = std::pow(p.q, 0.5 * alpha) * p.d_U + slack;
    if (!e.ok()) ++report.failures;
    report.epochs.push_back(e);
    y_s = s.state.y_s;
    alpha = 0;
  }
  return report;
}

EigenSelectionResult eigenvalue_selection_check(const EigenSpec& spec, double eta,
                                                const BoundParams& p) {
  if (!(eta > 0.0)) {
    throw InvalidParameter("eta must be positive");
  }
  const double lam_fast = std::abs(spec.lambda_fast());
  const double lam_slow = std::abs(spec.lambda_slow());
  const double s = 2.0 * p.d_U + p.d_U * std::pow(p.q, 0.5 * p.ell) +
                   p.norm_A_inv * p.norm_K * p.d_bar;
  EigenSelectionResult r;
  r.required_lam_fast = spec.mu_max() * s / (p.m_c * eta);
  r.required_lam_slow = std::sqrt(spec.mu_max() * s * lam_fast / (p.m_c * eta));
  r.lam_fast_ok = lam_fast >= r.required_lam_fast;
  r.lam_slow_ok = lam_slow >= r.required_lam_slow;
  r.asymptote_bound = spec.mu_max() * lam_fast / (p.m_c * lam_slow * lam_slow) * s;
  return r;
}

double tau_eps_closeness(const HybridTrajectory& a, const HybridTrajectory& b, double tau,
                         double resolution) {
  if (!(tau >= 0.0) || !(resolution > 0.0)) {
    throw InvalidParameter("closeness needs tau >= 0 and a positive resolution");
  }
  for (const auto* arc : {&a, &b}) {
    if (arc->samples.empty() || arc->t_end() + arc->j_end() < tau) {
      throw InsufficientData("arc does not reach hybrid time " + std::to_string(tau));
    }
  }
  const Segments sa = resample(a, resolution);
  const Segments sb = resample(b, resolution);
  return std::max(directed_closeness(sa, sb, tau), directed_closeness(sb, sa, tau));
}

QuadraticFit fit_quadratic_response(const std::vector<ResponseSample>& samples) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  if (n < 6) {
    throw RegressionError("quadratic response fit needs at least 6 samples");
  }
  Eigen::MatrixXd X(n, 6);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double k = samples[i].kappa;
    const double th = samples[i].theta;
    X.row(i) << 1.0, k, th, k * k, th * th, k * th;
    y(i) = samples[i].err;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < 6) {
    throw RegressionError("quadratic response design is rank deficient");
  }
  const Eigen::VectorXd c = qr.solve(y);
  const Eigen::VectorXd res = y - X * c;
  const double ss_res = res.squaredNorm();
  const double ss_tot = (y.array() - y.mean()).square().sum();

  QuadraticFit fit;
  for (int i = 0; i < 6; ++i) fit.coefficients[i] = c(i);
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  fit.max_abs_residual = res.cwiseAbs().maxCoeff();
  return fit;
}

}  // namespace hfo
