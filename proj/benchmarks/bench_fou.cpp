#include <benchmark/benchmark.h>

#include "roughfou/fou.hpp"

using namespace roughfou;

static void bm_cell_weights(benchmark::State& state) {
    const FouParams fp{{0.1, 1.0}, 0.01};
    GridSpec grid;
    grid.dt = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(cell_weights(fp, grid));
}
BENCHMARK(bm_cell_weights)->Arg(1000)->Arg(10000);

// per-path cost: direct convolution on the short grid, FFT on the long one
static void bm_path(benchmark::State& state) {
    const FouParams fp{{0.1, 1.0}, 0.01};
    GridSpec grid;
    grid.dt = 1.0 / static_cast<double>(state.range(0));
    const FouPathSet set(fp, grid, 1u << 20, 42, 0);
    FouPath p;
    std::uint64_t i = 0;
    for (auto _ : state) {
        set.path(i++ & ((1u << 20) - 1), p);
        benchmark::DoNotOptimize(p.y.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(bm_path)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
