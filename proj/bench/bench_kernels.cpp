#include <benchmark/benchmark.h>

#include "hfo/analysis.hpp"
#include "hfo/experiments.hpp"
#include "hfo/grid_search.hpp"

using namespace hfo;

namespace {

ExperimentConfig reference() {
  ExperimentConfig c;
  c.strict_stepsize = false;
  return c;
}

Exec exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Exec::Serial : Exec::Parallel;
}

void BM_GridSearch(benchmark::State& state) {
  const auto cfg = reference();
  const StabilizedPlant plant = build_plant(cfg);
  const Vec6 d = Vec6::Constant(2.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        grid_search_optimal_input(cfg.objective, plant.H, d, 1e-2, exec_of(state)));
  }
}
BENCHMARK(BM_GridSearch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_RendezvousError(benchmark::State& state) {
  const auto cfg = reference();
  const HybridModel m = build_model(cfg);
  const HybridTrajectory tr = simulate(cfg.init, cfg.horizon, m, cfg.sample_dt);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rendezvous_error(tr, m.objective, m.plant, *m.disturbance,
                                              cfg.solver_tol, exec_of(state)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(tr.samples.size()));
}
BENCHMARK(BM_RendezvousError)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Envelope(benchmark::State& state) {
  const auto cfg = reference();
  const HybridModel m = build_model(cfg);
  const HybridTrajectory tr = simulate(cfg.init, cfg.horizon, m, cfg.sample_dt);
  const ErrorSeries s =
      rendezvous_error(tr, m.objective, m.plant, *m.disturbance, cfg.solver_tol, Exec::Serial);
  const BoundParams p = make_bound_params(m);
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_envelope(s, p, cfg.init.x, InitErrMode::PerSample,
                                            exec_of(state)));
  }
}
BENCHMARK(BM_Envelope)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_Sweep(benchmark::State& state) {
  auto cfg = reference();
  cfg.horizon = 1000.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_perturbation_sweep(cfg, exec_of(state)));
  }
}
BENCHMARK(BM_Sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->Iterations(2);

void BM_Batch(benchmark::State& state) {
  auto cfg = reference();
  cfg.horizon = 1000.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_random_ic_batch(cfg, 20, 1, exec_of(state)));
  }
}
BENCHMARK(BM_Batch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace

BENCHMARK_MAIN();
