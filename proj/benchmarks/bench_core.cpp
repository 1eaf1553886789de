#include <benchmark/benchmark.h>

#include "gatedpore/engine.hpp"
#include "gatedpore/exact.hpp"
#include "gatedpore/params.hpp"
#include "gatedpore/pde.hpp"

namespace {

using namespace gatedpore;

DiscreteParams desk_lattice(std::int64_t n0, std::int64_t walkers)
{
    ContinuumParams c;
    c.D1 = 0.1;
    DiscreteParams d = bridge(c, n0, 1000, walkers).disc;
    return d;
}

// Leap stepping: cost grows with cycles and walkers, not with tau_bar.
void BM_EngineLeap(benchmark::State& state)
{
    const DiscreteParams d = desk_lattice(state.range(0), 1000);
    std::uint64_t seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(run(d, 5, seed++));
    state.SetItemsProcessed(state.iterations() * d.M * 5 * d.tau_bar);
}
BENCHMARK(BM_EngineLeap)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

// Stepwise reference path: one kernel draw per walker per step.
void BM_EngineStepwise(benchmark::State& state)
{
    const DiscreteParams d = desk_lattice(state.range(0), 100);
    EngineOptions opts;
    opts.stepping = Stepping::Stepwise;
    std::uint64_t seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(run(d, 2, seed++, opts));
    state.SetItemsProcessed(state.iterations() * d.M * 2 * d.tau_bar);
}
BENCHMARK(BM_EngineStepwise)->Arg(250)->Unit(benchmark::kMillisecond);

void BM_ExactPropagate(benchmark::State& state)
{
    DiscreteParams d;
    d.n0 = state.range(0);
    d.n1 = state.range(0) / 4;
    d.r = 0.9;
    d.tau_bar = 100;
    d.sigma_bar = 10;
    auto dist = exact::closed_stationary(d);
    for (auto _ : state) {
        dist = exact::propagate(dist, Phase::Open, d);
        benchmark::DoNotOptimize(dist.absorbed);
    }
}
BENCHMARK(BM_ExactPropagate)->Arg(64)->Arg(1024);

void BM_AlternatingCycle(benchmark::State& state)
{
    ContinuumParams c;
    c.D1 = 0.1;
    c.tau = 0.01;
    pde::GridSpec grid;
    grid.bulk_intervals = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(pde::solve_alternating(c, grid, 0.01));
}
BENCHMARK(BM_AlternatingCycle)->Arg(200)->Arg(800);

} // namespace

BENCHMARK_MAIN();
