#include <benchmark/benchmark.h>

#include "roughfou/kernel.hpp"

using namespace roughfou;

static void bm_kernel_eval(benchmark::State& state) {
    const KernelParams kp{0.1, 1.0};
    double t = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernel_eval(t, kp));
        t = t < 50.0 ? t * 1.01 : 0.3;
    }
}
BENCHMARK(bm_kernel_eval);

static void bm_kernel_primitive(benchmark::State& state) {
    const KernelParams kp{0.1, 1.0};
    double t = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernel_primitive(t, kp));
        t = t < 50.0 ? t * 1.01 : 0.3;
    }
}
BENCHMARK(bm_kernel_primitive);

static void bm_cov_stationary(benchmark::State& state) {
    const KernelParams kp{0.1, 1.0};
    const double s = static_cast<double>(state.range(0)) / 10.0;
    for (auto _ : state) benchmark::DoNotOptimize(cov_stationary(s, kp));
}
BENCHMARK(bm_cov_stationary)->Arg(2)->Arg(10)->Arg(50);

static void bm_kernel_l2_norm(benchmark::State& state) {
    const KernelParams kp{0.1, 1.0};
    for (auto _ : state) benchmark::DoNotOptimize(kernel_l2_norm_sq(kp));
}
BENCHMARK(bm_kernel_l2_norm);
