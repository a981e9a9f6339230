// Serial reference vs OpenMP kernels. Run with --benchmark_counters_tabular=true.
#include <benchmark/benchmark.h>

#include <vector>

#include "thermolab/ensemble.hpp"
#include "thermolab/micro_sim.hpp"
#include "thermolab/rough_lift.hpp"
#include "thermolab/sde_limit.hpp"
#include "thermolab/stationary.hpp"

using namespace thermolab;

namespace {

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void label(benchmark::State& state) {
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}

void BM_MicroEnsemble(benchmark::State& state) {
  micro::ModelParams p;
  p.t_final = 100.0;
  for (auto _ : state) {
    auto out = generate_ensemble(
        64, 1, 0, [&](RngStream& rng, std::size_t) { return micro::simulate_trajectory(p, rng); },
        mode(state));
    benchmark::DoNotOptimize(out.data());
  }
  label(state);
}

void BM_StratSphereEnsemble(benchmark::State& state) {
  sde::SdeConfig c;
  c.t_final = 5.0;
  c.step = 0.01;
  for (auto _ : state) {
    auto out = generate_ensemble(
        256, 1, 0, [&](RngStream& rng, std::size_t) { return sde::strat_sphere_solve(c, rng); },
        mode(state));
    benchmark::DoNotOptimize(out.data());
  }
  label(state);
}

const rough::RoughPathGrid& spiral_lift() {
  static const rough::RoughPathGrid rp = [] {
    const auto w = rough::spiral_example(0.1, 100'000);
    std::vector<double> grid(4001);
    for (std::size_t i = 0; i < grid.size(); ++i)
      grid[i] = static_cast<double>(i) / (grid.size() - 1);
    grid.back() = w.end_time();
    return rough::canonical_lift(w, grid);
  }();
  return rp;
}

void BM_HolderNorms(benchmark::State& state) {
  const auto& rp = spiral_lift();
  for (auto _ : state) benchmark::DoNotOptimize(rough::holder_norms(rp, 0.45, mode(state)));
  label(state);
}

const stationary::StationaryDriverEnsemble& psi_ensemble() {
  static const auto ens = stationary::simulate_stationary_psi(micro::ModelParams{}, 20.0, 2000, 3);
  return ens;
}

void BM_GreenKubo(benchmark::State& state) {
  const auto& ens = psi_ensemble();
  for (auto _ : state)
    benchmark::DoNotOptimize(stationary::green_kubo_constants(ens, 15, mode(state)));
  label(state);
}

void BM_Autocov(benchmark::State& state) {
  const auto& ens = psi_ensemble();
  for (auto _ : state)
    benchmark::DoNotOptimize(stationary::autocov_psi(ens, {0.0, 0.5, 1.0, 2.0}, mode(state)));
  label(state);
}

}  // namespace

BENCHMARK(BM_MicroEnsemble)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_StratSphereEnsemble)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_HolderNorms)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GreenKubo)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Autocov)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
