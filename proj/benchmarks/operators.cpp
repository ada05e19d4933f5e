// Microbenchmarks for the operators on the flow's hot path: the Abreu
// curvature operator, the energy/curvature monitors, the metric distance,
// a single integrator step, and a short adaptive run.  Grid sizes sweep the
// range the test suites and CLI experiments actually use.

#include "calabi/energetics.hpp"
#include "calabi/fixtures.hpp"
#include "calabi/flow.hpp"
#include "calabi/grid.hpp"
#include "calabi/mabuchi.hpp"
#include "calabi/toric.hpp"

#include <benchmark/benchmark.h>

using namespace calabi;

namespace {

void BM_AbreuScalar1D(benchmark::State& state) {
    const Grid grid = make_grid(1, static_cast<int>(state.range(0)));
    const SymplecticPotential u = fixture("F1", grid);
    for (auto _ : state) {
        benchmark::DoNotOptimize(abreu_scalar_curvature(u));
    }
    state.SetItemsProcessed(state.iterations() * grid.point_count());
}
BENCHMARK(BM_AbreuScalar1D)->RangeMultiplier(2)->Range(64, 1024);

void BM_AbreuScalar2D(benchmark::State& state) {
    const Grid grid = make_grid(2, static_cast<int>(state.range(0)));
    const SymplecticPotential u = fixture("F2", grid);
    for (auto _ : state) {
        benchmark::DoNotOptimize(abreu_scalar_curvature(u));
    }
    state.SetItemsProcessed(state.iterations() * grid.point_count());
}
BENCHMARK(BM_AbreuScalar2D)->RangeMultiplier(2)->Range(16, 128);

void BM_EnergyReport(benchmark::State& state) {
    const Grid grid = make_grid(1, static_cast<int>(state.range(0)));
    const SymplecticPotential u = fixture("F1", grid);
    for (auto _ : state) {
        benchmark::DoNotOptimize(energy_report(u));
    }
}
BENCHMARK(BM_EnergyReport)->Arg(256)->Arg(1024);

void BM_KEnergyGradient(benchmark::State& state) {
    const Grid grid = make_grid(1, static_cast<int>(state.range(0)));
    const SymplecticPotential u = fixture("F1", grid);
    for (auto _ : state) {
        benchmark::DoNotOptimize(k_energy_gradient(u));
    }
}
BENCHMARK(BM_KEnergyGradient)->Arg(256)->Arg(1024);

void BM_RicciMonitor1D(benchmark::State& state) {
    const Grid grid = make_grid(1, static_cast<int>(state.range(0)));
    const SymplecticPotential u = fixture("F1", grid);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ricci_monitor(u));
    }
}
BENCHMARK(BM_RicciMonitor1D)->Arg(256);

void BM_RicciMonitor2D(benchmark::State& state) {
    const Grid grid = make_grid(2, static_cast<int>(state.range(0)));
    const SymplecticPotential u = fixture("F2", grid);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ricci_monitor(u));
    }
}
BENCHMARK(BM_RicciMonitor2D)->Arg(32)->Arg(64);

void BM_Distance(benchmark::State& state) {
    const Grid grid = make_grid(1, 256);
    const SymplecticPotential a = fixture("F1", grid);
    const SymplecticPotential b = random_admissible(grid, 42);
    for (auto _ : state) {
        benchmark::DoNotOptimize(distance(a, b));
    }
}
BENCHMARK(BM_Distance);

void BM_FlowStep(benchmark::State& state) {
    const Grid grid = make_grid(1, static_cast<int>(state.range(0)));
    const FlowState start = make_flow_state(0.0, fixture("F1", grid));
    for (auto _ : state) {
        benchmark::DoNotOptimize(step(start, 1e-7));
    }
}
BENCHMARK(BM_FlowStep)->Arg(128)->Arg(256)->Arg(512);

void BM_ShortRun(benchmark::State& state) {
    const Grid grid = make_grid(1, 128);
    const SymplecticPotential u = fixture("F1b", grid);
    FlowConfig config;
    config.t_max = 1e-4;
    config.dt_init = 1e-6;
    config.record_every = 1 << 20;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run(config, u));
    }
}
BENCHMARK(BM_ShortRun);

} // namespace

BENCHMARK_MAIN();
