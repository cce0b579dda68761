#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hfo/analysis.hpp"
#include "hfo/disturbance.hpp"
#include "hfo/dynamics.hpp"
#include "hfo/hybrid.hpp"
#include "hfo/objective.hpp"

namespace hfo {

struct DisturbanceSpec {
  std::string kind = "sine";  // zero | constant | sine
  double amplitude = 5.0;
  double omega = 1.0;

  DisturbancePtr make() const;
};

struct SweepGrid {
  std::vector<double> thetas{-0.25, 0.5, 1.0};
  std::vector<double> kappas{0.1, 0.3, 0.5, 0.7, 0.9};
  ResetPolicy reset_policy = ResetPolicy::UniformRandom;
};

struct BatchSpec {
  int n = 20;
  std::uint64_t seed = 1;
  Vec6 x_lo = (Vec6() << 1000, -2000, -3500, 0.1, 0.1, 0.1).finished();
  Vec6 x_hi = (Vec6() << 2000, -1000, -2500, 4.0, 4.0, 4.0).finished();
  /// y_s(0, 0) = x(0, 0) + ys_offset * 1_6.
  double ys_offset = 5.0;
};

/// A full run description. Default construction gives the rendezvous
/// scenario of the reference study (a = 6.871e6 m, m_c = 1 kg).
struct ExperimentConfig {
  OrbitalParams orbit;
  std::array<double, 6> eigenvalues{-0.0155, -0.0163, -0.0155, -0.0170, -0.0165, -0.0170};
  QuadObjective objective = default_objective();
  /// Reject stepsizes outside (0, 2 / (lambda_min(Q_u) + L)) at load time.
  bool strict_stepsize = true;
  TimerConfig timers;
  PerturbationRho rho;
  SimOptions sim;
  DisturbanceSpec disturbance;
  HybridState init = default_initial_state();
  double horizon = 2000.0;
  double sample_dt = 0.5;
  double window = 400.0;
  double solver_tol = 1e-10;
  InitErrMode init_err_mode = InitErrMode::PerSample;
  SweepGrid sweep;
  BatchSpec batch;
  std::string out_dir = "out";

  /// Builds every referenced object once, so all module invariants are
  /// checked. Throws ConfigError (or the module's own error) on failure.
  void validate() const;

  static QuadObjective default_objective();
  static HybridState default_initial_state();
};

/// Flat YAML mapping; unknown keys are rejected. Keys missing from the file
/// keep their defaults. Throws ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// The documented key list, one per line, with defaults.
std::string dump_config(const ExperimentConfig& cfg);

StabilizedPlant build_plant(const ExperimentConfig& cfg);
HybridModel build_model(const ExperimentConfig& cfg);
HybridModel build_model(const ExperimentConfig& cfg, const PerturbationRho& rho,
                        ResetPolicy policy, std::uint64_t seed);

struct RunSummary {
  std::string label;
  double theta = 0.0;
  double kappa = 0.0;
  PerturbationRho rho;
  std::uint64_t seed = 0;
  Vec6 x0 = Vec6::Zero();
  double asymptotic_error = 0.0;
  int jumps = 0;
  std::size_t envelope_violations = 0;
  double min_margin = 0.0;
};

struct RhoAggregate {
  double rho = 0.0;
  /// Worst asymptotic error among the cells with this rho.
  double error = 0.0;
  int cells = 0;
};

struct CampaignResult {
  std::vector<RunSummary> runs;
  /// Unperturbed reference run of a sweep, same reset policy and seed.
  std::optional<RunSummary> baseline;
  std::vector<RhoAggregate> by_rho;

  double max_error() const;
};

/// Everything a single simulated run produces.
struct RunArtifacts {
  HybridModel model;
  HybridTrajectory trajectory;
  ErrorSeries errors;
  BoundParams bounds;
  EnvelopeReport envelope;
  double asymptotic_error = 0.0;
};

RunArtifacts run_single(const ExperimentConfig& cfg, const HybridModel& model,
                        const HybridState& init, Exec exec = Exec::Parallel);

struct NominalResult {
  RunArtifacts run;
  double thm_asymptote = 0.0;
  double prop_asymptote = 0.0;
  /// asymptotic error / amplitude, and / (amplitude sqrt 6).
  double ratio_amplitude = 0.0;
  double ratio_vector = 0.0;
  InputGapReport input_gap;
};

NominalResult run_nominal(const ExperimentConfig& cfg);

/// One run per (theta, kappa) cell plus the unperturbed baseline. Cell
/// seeds are seed + 1 + cell index, the baseline uses seed.
CampaignResult run_perturbation_sweep(const ExperimentConfig& cfg, Exec exec = Exec::Parallel);

/// n initial conditions uniform in the batch box drawn from one seeded
/// stream, then simulated independently.
CampaignResult run_random_ic_batch(const ExperimentConfig& cfg, int n, std::uint64_t seed,
                                   Exec exec = Exec::Parallel);

std::vector<ResponseSample> response_samples(const CampaignResult& sweep);
QuadraticFit fit_quadratic_response(const CampaignResult& sweep);

/// Rows kappa, columns theta, in the grid order of the config.
void write_sweep_table_csv(const std::string& path, const ExperimentConfig& cfg,
                           const CampaignResult& sweep);
void write_rho_table_csv(const std::string& path, const CampaignResult& sweep);
void write_campaign_csv(const std::string& path, const CampaignResult& result);

}  // namespace hfo
