#include "hfo/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <random>

#include "hfo/errors.hpp"
#include "hfo/io.hpp"

namespace hfo {

namespace {

RunSummary summarize(const RunArtifacts& run, std::string label) {
  RunSummary s;
  s.label = std::move(label);
  s.rho = run.model.rho;
  s.seed = run.model.timers.seed;
  s.x0 = run.trajectory.samples.front().state.x;
  s.asymptotic_error = run.asymptotic_error;
  s.jumps = run.trajectory.j_end();
  s.envelope_violations = run.envelope.violations;
  s.min_margin = run.envelope.min_margin;
  return s;
}

// Runs body(i) for i in [0, n), concurrently when asked, and rethrows the
// first failure in index order.
template <typename Body>
void run_indexed(std::size_t n, Exec exec, Body&& body) {
  std::vector<std::exception_ptr> errors(n);
  const auto guarded = [&](std::size_t i) {
    try {
      body(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < n; ++i) guarded(i);
  } else {
    for (std::size_t i = 0; i < n; ++i) guarded(i);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open '" + path + "' for writing");
  return os;
}

}  // namespace

StabilizedPlant build_plant(const ExperimentConfig& cfg) {
  cfg.orbit.validate();
  return build_plant(cfg.orbit, EigenSpec(cfg.eigenvalues));
}

HybridModel build_model(const ExperimentConfig& cfg) {
  return build_model(cfg, cfg.rho, cfg.timers.reset_policy, cfg.timers.seed);
}

HybridModel build_model(const ExperimentConfig& cfg, const PerturbationRho& rho,
                        ResetPolicy policy, std::uint64_t seed) {
  HybridModel model{
      .plant = build_plant(cfg),
      .objective = cfg.objective,
      .disturbance = cfg.disturbance.make(),
      .timers = cfg.timers,
      .rho = rho,
      .options = cfg.sim,
  };
  model.timers.reset_policy = policy;
  model.timers.seed = seed;
  model.validate();
  if (cfg.strict_stepsize) compute_constants(model.objective, model.plant);
  return model;
}

double CampaignResult::max_error() const {
  double m = 0.0;
  for (const auto& r : runs) m = std::max(m, r.asymptotic_error);
  return m;
}

RunArtifacts run_single(const ExperimentConfig& cfg, const HybridModel& model,
                        const HybridState& init, Exec exec) {
  RunArtifacts r{.model = model, .trajectory = {}, .errors = {}, .bounds = {}, .envelope = {}};
  r.trajectory = simulate(init, cfg.horizon, r.model, cfg.sample_dt);
  r.errors = rendezvous_error(r.trajectory, r.model.objective, r.model.plant,
                              *r.model.disturbance, cfg.solver_tol, exec);
  r.bounds = make_bound_params(r.model);
  r.envelope = check_envelope(r.errors, r.bounds, init.x, cfg.init_err_mode, exec);
  r.asymptotic_error = asymptotic_error(r.errors, cfg.window);
  return r;
}

NominalResult run_nominal(const ExperimentConfig& cfg) {
  cfg.validate();
  NominalResult n{.run = run_single(cfg, build_model(cfg), cfg.init), .input_gap = {}};
  n.thm_asymptote = thm_asymptote(n.run.bounds);
  n.prop_asymptote = prop_asymptote(n.run.bounds);
  const double amp = std::abs(cfg.disturbance.amplitude);
  if (cfg.disturbance.kind != "zero" && amp > 0.0) {
    n.ratio_amplitude = n.run.asymptotic_error / amp;
    n.ratio_vector = n.run.asymptotic_error / (amp * std::sqrt(6.0));
  }
  n.input_gap = input_gap_check(n.run.trajectory, n.run.model.objective, n.run.model.plant,
                                n.run.bounds);
  return n;
}

CampaignResult run_perturbation_sweep(const ExperimentConfig& cfg, Exec exec) {
  cfg.validate();
  struct Cell {
    double theta;
    double kappa;
  };
  std::vector<Cell> cells;
  for (double k : cfg.sweep.kappas) {
    for (double th : cfg.sweep.thetas) cells.push_back({th, k});
  }

  const std::uint64_t base = cfg.timers.seed;
  const auto policy = cfg.sweep.reset_policy;
  // Slot 0 is the unperturbed baseline.
  std::vector<RunSummary> out(cells.size() + 1);
  run_indexed(out.size(), exec, [&](std::size_t i) {
    const PerturbationRho rho =
        i == 0 ? PerturbationRho{} : PerturbationRho::uniform(cells[i - 1].theta, cells[i - 1].kappa);
    const HybridModel model = build_model(cfg, rho, policy, base + i);
    // Negative offsets shrink the flow set below the configured start timers.
    HybridState init = cfg.init;
    init.tau_c = std::min(init.tau_c, model.tau_c_reset_hi());
    init.tau_g = std::min(init.tau_g, model.tau_g_reset());
    const RunArtifacts run = run_single(cfg, model, init, Exec::Serial);
    out[i] = summarize(run, i == 0 ? "baseline" : "cell");
    if (i > 0) {
      out[i].theta = cells[i - 1].theta;
      out[i].kappa = cells[i - 1].kappa;
    }
  });

  CampaignResult result;
  result.baseline = out.front();
  result.runs.assign(out.begin() + 1, out.end());

  std::map<double, RhoAggregate> agg;
  for (const auto& r : result.runs) {
    const double rho = std::max(r.theta, r.kappa);
    auto& a = agg[rho];
    a.rho = rho;
    a.error = a.cells == 0 ? r.asymptotic_error : std::max(a.error, r.asymptotic_error);
    ++a.cells;
  }
  for (const auto& [rho, a] : agg) result.by_rho.push_back(a);
  return result;
}

CampaignResult run_random_ic_batch(const ExperimentConfig& cfg, int n, std::uint64_t seed,
                                   Exec exec) {
  cfg.validate();
  if (n < 1) throw InvalidParameter("batch size must be at least 1");

  std::mt19937_64 rng(seed);
  std::vector<HybridState> inits(static_cast<std::size_t>(n), cfg.init);
  for (auto& s : inits) {
    for (int k = 0; k < 6; ++k) {
      const double lo = std::min(cfg.batch.x_lo(k), cfg.batch.x_hi(k));
      const double hi = std::max(cfg.batch.x_lo(k), cfg.batch.x_hi(k));
      s.x(k) = std::uniform_real_distribution<double>(lo, hi)(rng);
    }
    s.y_s = s.x + Vec6::Constant(cfg.batch.ys_offset);
  }

  const HybridModel model = build_model(cfg);
  CampaignResult result;
  result.runs.resize(inits.size());
  run_indexed(inits.size(), exec, [&](std::size_t i) {
    const RunArtifacts run = run_single(cfg, model, inits[i], Exec::Serial);
    result.runs[i] = summarize(run, "ic" + std::to_string(i));
  });
  return result;
}

std::vector<ResponseSample> response_samples(const CampaignResult& sweep) {
  std::vector<ResponseSample> s;
  for (const auto& r : sweep.runs) s.push_back({r.kappa, r.theta, r.asymptotic_error});
  return s;
}

QuadraticFit fit_quadratic_response(const CampaignResult& sweep) {
  return fit_quadratic_response(response_samples(sweep));
}

void write_sweep_table_csv(const std::string& path, const ExperimentConfig& cfg,
                           const CampaignResult& sweep) {
  auto os = open_out(path);
  os << "kappa";
  for (double th : cfg.sweep.thetas) os << ",theta=" << format_double(th);
  os << '\n';
  for (double k : cfg.sweep.kappas) {
    os << format_double(k);
    for (double th : cfg.sweep.thetas) {
      const auto it = std::find_if(sweep.runs.begin(), sweep.runs.end(), [&](const RunSummary& r) {
        return r.kappa == k && r.theta == th;
      });
      os << ',' << (it == sweep.runs.end() ? std::string() : format_double(it->asymptotic_error));
    }
    os << '\n';
  }
}

void write_rho_table_csv(const std::string& path, const CampaignResult& sweep) {
  auto os = open_out(path);
  os << "rho,error,cells\n";
  for (const auto& a : sweep.by_rho) {
    os << format_double(a.rho) << ',' << format_double(a.error) << ',' << a.cells << '\n';
  }
}

void write_campaign_csv(const std::string& path, const CampaignResult& result) {
  auto os = open_out(path);
  os << "label,theta,kappa,rho,seed,x1,x2,x3,x4,x5,x6,asymptotic_error,jumps,"
        "envelope_violations,min_margin\n";
  auto row = [&](const RunSummary& r) {
    os << r.label << ',' << format_double(r.theta) << ',' << format_double(r.kappa) << ','
       << format_double(r.rho.rho()) << ',' << r.seed;
    for (int k = 0; k < 6; ++k) os << ',' << format_double(r.x0(k));
    os << ',' << format_double(r.asymptotic_error) << ',' << r.jumps << ','
       << r.envelope_violations << ',' << format_double(r.min_margin) << '\n';
  };
  if (result.baseline) row(*result.baseline);
  for (const auto& r : result.runs) row(r);
}

}  // namespace hfo
