#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <spdlog/spdlog.h>

#include "hfo/analysis.hpp"
#include "hfo/errors.hpp"
#include "hfo/experiments.hpp"
#include "hfo/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> horizon;
  std::optional<double> sample_dt;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "Experiment config (flat YAML)")->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "Output directory");
  cmd->add_option("--seed", c.seed, "Seed for randomized resets and initial conditions");
  cmd->add_option("--horizon", c.horizon, "Simulated time, s");
  cmd->add_option("--sample-dt", c.sample_dt, "Flow sampling period, s");
}

hfo::ExperimentConfig load(const Common& c) {
  hfo::ExperimentConfig cfg = c.config.empty() ? hfo::ExperimentConfig{} : hfo::load_config(c.config);
  if (c.seed) {
    cfg.timers.seed = *c.seed;
    cfg.batch.seed = *c.seed;
  }
  if (c.horizon) cfg.horizon = *c.horizon;
  if (c.sample_dt) cfg.sample_dt = *c.sample_dt;
  if (!c.out.empty()) cfg.out_dir = c.out;
  cfg.validate();
  spdlog::debug("configuration:\n{}", hfo::dump_config(cfg));
  return cfg;
}

std::string out_path(const hfo::ExperimentConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return (fs::path(cfg.out_dir) / name).string();
}

void print_matrix(const std::string& title, const Eigen::MatrixXd& m, int precision) {
  fmt::print("{}\n", title);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) fmt::print(" {:>12.{}f}", m(r, c), precision);
    fmt::print("\n");
  }
}

int synthesize_gains(const Common& c) {
  const auto cfg = load(c);
  const hfo::StabilizedPlant plant = hfo::build_plant(cfg);
  fmt::print("mean motion w = {:.6e} rad/s, m_c = {} kg\n", plant.w, plant.m_c);
  for (int k : {1, 4, 5, 8, 10, 11, 15, 18}) fmt::print("k{} = {:.8g}\n", k, plant.gains.k(k));
  print_matrix("K", plant.gains.K, 8);
  print_matrix("A_stab", plant.A, 4);
  print_matrix("H_stab", plant.H, 4);
  Eigen::EigenSolver<hfo::Mat6> es(plant.A);
  fmt::print("eig(A_stab):");
  for (int i = 0; i < 6; ++i) fmt::print(" {:.10g}", es.eigenvalues()(i).real());
  fmt::print("\nplacement verified (1e-8): {}\n", hfo::verify_eigen_placement(plant, 1e-8));
  const auto k = hfo::evaluate_constants(cfg.objective, plant.H);
  fmt::print("||A_stab^-1|| = {:.6g}, ||K|| = {:.6g}\n", plant.norm_A_inv, plant.norm_K);
  fmt::print("L = {:.6g}, q = {:.6g}, gamma = {}, admissible gamma < {:.6g}{}\n", k.L, k.q,
             cfg.objective.gamma, k.gamma_max, k.valid(cfg.objective.gamma) ? "" : " (outside)");
  return 0;
}

int simulate(const Common& c) {
  const auto cfg = load(c);
  const hfo::NominalResult n = hfo::run_nominal(cfg);
  hfo::write_trajectory_csv(out_path(cfg, "trajectory.csv"), n.run.trajectory);
  hfo::write_bound_report_csv(out_path(cfg, "bounds.csv"), n.run.errors, n.run.envelope);

  std::size_t case2 = 0;
  for (const auto& j : n.run.trajectory.jumps) case2 += j.jump_case == hfo::JumpCase::CaseII;
  fmt::print("samples {}, jumps {} (case ii: {})\n", n.run.trajectory.samples.size(),
             n.run.trajectory.j_end(), case2);
  fmt::print("asymptotic error (last {} s): {:.6g} m\n", cfg.window, n.run.asymptotic_error);
  if (n.ratio_amplitude > 0.0) {
    fmt::print("error / amplitude: {:.6g} (reduction {:.2f}%), error / (amplitude sqrt 6): {:.6g} "
               "(reduction {:.2f}%)\n",
               n.ratio_amplitude, 100.0 * (1.0 - n.ratio_amplitude), n.ratio_vector,
               100.0 * (1.0 - n.ratio_vector));
  }
  fmt::print("theorem asymptote {:.6g} m, proposition asymptote {:.6g} m, q = {:.6g}\n",
             n.thm_asymptote, n.prop_asymptote, n.run.bounds.q);
  fmt::print("envelope violations {}, min margin {:.6g}\n", n.run.envelope.violations,
             n.run.envelope.min_margin);
  fmt::print("input-gap epochs {}, failures {}\n", n.input_gap.epochs.size(), n.input_gap.failures);
  fmt::print("wrote {}/trajectory.csv and {}/bounds.csv\n", cfg.out_dir, cfg.out_dir);
  return 0;
}

int sweep(const Common& c) {
  const auto cfg = load(c);
  const hfo::CampaignResult r = hfo::run_perturbation_sweep(cfg);
  hfo::write_sweep_table_csv(out_path(cfg, "sweep_table.csv"), cfg, r);
  hfo::write_rho_table_csv(out_path(cfg, "rho_table.csv"), r);
  hfo::write_campaign_csv(out_path(cfg, "sweep_runs.csv"), r);

  fmt::print("baseline asymptotic error {:.6g} m\n", r.baseline->asymptotic_error);
  fmt::print("{:>8}", "kappa");
  for (double th : cfg.sweep.thetas) fmt::print(" {:>12}", fmt::format("theta={}", th));
  fmt::print("\n");
  for (double k : cfg.sweep.kappas) {
    fmt::print("{:>8}", k);
    for (double th : cfg.sweep.thetas) {
      for (const auto& run : r.runs) {
        if (run.kappa == k && run.theta == th) fmt::print(" {:>12.4g}", run.asymptotic_error);
      }
    }
    fmt::print("\n");
  }
  for (const auto& a : r.by_rho) {
    fmt::print("rho {:>5}: {:.4g} m over {} cells\n", a.rho, a.error, a.cells);
  }
  const auto fit = hfo::fit_quadratic_response(r);
  fmt::print("fit: c = ({:.4g}, {:.4g}, {:.4g}, {:.4g}, {:.4g}, {:.4g}), R^2 = {:.4f}\n",
             fit.coefficients[0], fit.coefficients[1], fit.coefficients[2], fit.coefficients[3],
             fit.coefficients[4], fit.coefficients[5], fit.r_squared);
  return 0;
}

int batch_ic(const Common& c, std::optional<int> n) {
  const auto cfg = load(c);
  const int count = n.value_or(cfg.batch.n);
  const hfo::CampaignResult r = hfo::run_random_ic_batch(cfg, count, cfg.batch.seed);
  hfo::write_campaign_csv(out_path(cfg, "batch.csv"), r);
  for (const auto& run : r.runs) {
    fmt::print("{:>5}: x0 = ({:.1f}, {:.1f}, {:.1f}, {:.2f}, {:.2f}, {:.2f}) -> {:.6g} m\n",
               run.label, run.x0(0), run.x0(1), run.x0(2), run.x0(3), run.x0(4), run.x0(5),
               run.asymptotic_error);
  }
  fmt::print("max asymptotic error over {} runs: {:.6g} m\n", r.runs.size(), r.max_error());
  return 0;
}

int bounds(const Common& c, const std::string& traj_path, std::optional<double> eta) {
  const auto cfg = load(c);
  const hfo::HybridModel model = hfo::build_model(cfg);
  const hfo::HybridTrajectory traj = traj_path.empty()
                                         ? hfo::simulate(cfg.init, cfg.horizon, model, cfg.sample_dt)
                                         : hfo::read_trajectory_csv(traj_path);
  if (traj.samples.empty()) throw hfo::InsufficientData("trajectory has no samples");
  const auto series = hfo::rendezvous_error(traj, model.objective, model.plant,
                                            *model.disturbance, cfg.solver_tol);
  const auto p = hfo::make_bound_params(model);
  const auto report = hfo::check_envelope(series, p, traj.samples.front().state.x, cfg.init_err_mode);
  hfo::write_bound_report_csv(out_path(cfg, "bounds.csv"), series, report);

  fmt::print("mu_max {}, |l1| {:.6g}, |l6| {:.6g}, d_U {:.6g}, q {:.6g}, ell {}, d_bar {:.6g}\n",
             p.mu_max, p.lam_slow, p.lam_fast, p.d_U, p.q, p.ell, p.d_bar);
  fmt::print("proposition asymptote {:.6g} m, theorem asymptote {:.6g} m\n",
             hfo::prop_asymptote(p), hfo::thm_asymptote(p));
  fmt::print("envelope violations {} of {}, min margin {:.6g}\n", report.violations,
             series.points.size(), report.min_margin);
  if (eta) {
    const auto sel = hfo::eigenvalue_selection_check(model.plant.spec, *eta, p);
    fmt::print("eta {}: need |l6| >= {:.6g} ({}), |l1| >= {:.6g} ({}); asymptote bound {:.6g}\n",
               *eta, sel.required_lam_fast, sel.lam_fast_ok ? "ok" : "fails",
               sel.required_lam_slow, sel.lam_slow_ok ? "ok" : "fails", sel.asymptote_bound);
  }
  fmt::print("wrote {}/bounds.csv\n", cfg.out_dir);
  return 0;
}

// Table layout: header "kappa,<theta columns>", then one row per kappa.
std::vector<hfo::ResponseSample> read_table(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw hfo::ConfigError("cannot read table '" + path + "'");
  std::string line;
  std::getline(is, line);
  std::vector<double> thetas;
  {
    std::istringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    while (std::getline(ss, cell, ',')) {
      const auto eq = cell.find('=');
      thetas.push_back(std::stod(eq == std::string::npos ? cell : cell.substr(eq + 1)));
    }
  }
  std::vector<hfo::ResponseSample> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    const double kappa = std::stod(cell);
    for (double th : thetas) {
      if (!std::getline(ss, cell, ',')) throw hfo::ConfigError("short row in '" + path + "'");
      out.push_back({kappa, th, std::stod(cell)});
    }
  }
  return out;
}

int fit_regression(const std::string& table) {
  const auto samples = read_table(table);
  const auto fit = hfo::fit_quadratic_response(samples);
  fmt::print("err ~ {:.4f} + {:.4f} k + {:.4f} th + {:.4f} k^2 + {:.4f} th^2 + {:.4f} k th\n",
             fit.coefficients[0], fit.coefficients[1], fit.coefficients[2], fit.coefficients[3],
             fit.coefficients[4], fit.coefficients[5]);
  fmt::print("R^2 = {:.6f}, max |residual| = {:.4g}, samples = {}\n", fit.r_squared,
             fit.max_abs_residual, samples.size());
  return 0;
}

void setup_logging() {
  auto level = spdlog::level::warn;
  if (const char* env = std::getenv("HFO_LOG_LEVEL")) level = spdlog::level::from_str(env);
  spdlog::set_level(level);
  spdlog::set_pattern("[%l] %v");
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Hybrid feedback optimization for satellite rendezvous"};
  app.require_subcommand(1);

  Common common;
  auto* gains_cmd = app.add_subcommand("synthesize-gains", "Print K, A_stab, H_stab and q");
  add_common(gains_cmd, common);

  auto* sim_cmd = app.add_subcommand("simulate", "Run one trajectory and its bound report");
  add_common(sim_cmd, common);

  auto* sweep_cmd = app.add_subcommand("sweep", "Perturbation grid over theta and kappa");
  add_common(sweep_cmd, common);

  std::optional<int> batch_n;
  auto* batch_cmd = app.add_subcommand("batch-ic", "Random initial-condition batch");
  add_common(batch_cmd, common);
  batch_cmd->add_option("--n", batch_n, "Number of initial conditions");

  std::string traj_path;
  std::optional<double> eta;
  auto* bounds_cmd = app.add_subcommand("bounds", "Envelope check for a trajectory");
  add_common(bounds_cmd, common);
  bounds_cmd->add_option("--traj", traj_path, "Trajectory CSV (simulated if omitted)")
      ->check(CLI::ExistingFile);
  bounds_cmd->add_option("--eta", eta, "Target error radius for the eigenvalue check, m");

  std::string table;
  auto* fit_cmd = app.add_subcommand("fit-regression", "Quadratic fit of a kappa x theta table");
  fit_cmd->add_option("--table", table, "Table CSV: kappa,theta=... header")
      ->required()
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*gains_cmd) return synthesize_gains(common);
    if (*sim_cmd) return simulate(common);
    if (*sweep_cmd) return sweep(common);
    if (*batch_cmd) return batch_ic(common, batch_n);
    if (*bounds_cmd) return bounds(common, traj_path, eta);
    if (*fit_cmd) return fit_regression(table);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  return 2;
}
