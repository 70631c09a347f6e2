#include <benchmark/benchmark.h>

#include <cmath>

#include "stokes/kernels.hpp"
#include "stokes/nlie.hpp"
#include "stokes/oracle.hpp"
#include "stokes/wkb.hpp"

using namespace stokes;

static void BM_KernelTable(benchmark::State& s) {
    SolverConfig cfg;
    for (auto _ : s) {
        KernelTable kt(3.0, cfg.grid, cfg.delta);
        benchmark::DoNotOptimize(kt.total(1));
    }
}
BENCHMARK(BM_KernelTable)->Unit(benchmark::kMillisecond);

static void BM_Convolve(benchmark::State& s) {
    SolverConfig cfg;
    KernelTable kt(3.0, cfg.grid, cfg.delta);
    std::vector<cplx> g(cfg.grid.N);
    for (int i = 0; i < cfg.grid.N; ++i) g[i] = std::exp(-0.5 * std::pow(cfg.grid.at(i) + 5.0, 2));
    for (auto _ : s) benchmark::DoNotOptimize(kt.convolve(2, true, g, 0.0));
}
BENCHMARK(BM_Convolve)->Unit(benchmark::kMicrosecond);

static void BM_NlieSolve(benchmark::State& s) {
    SolverConfig cfg;
    KernelTable kt(3.0, cfg.grid, cfg.delta);
    const double alpha = s.range(0) / 2.0;
    for (auto _ : s) benchmark::DoNotOptimize(solve(3.0, alpha, +1, cfg, kt));
}
BENCHMARK(BM_NlieSolve)->Arg(0)->Arg(2)->Arg(5)->Unit(benchmark::kMillisecond);

static void BM_OracleShot(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(phi_at_origin(3.0, 1.0, cplx(5.0, 0.3)));
}
BENCHMARK(BM_OracleShot)->Unit(benchmark::kMicrosecond);

static void BM_OracleLevel(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(parity_levels(3.0, -1.0, +1, 1));
}
BENCHMARK(BM_OracleLevel)->Unit(benchmark::kMillisecond);

static void BM_WkbLevel(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(wkb_energy(1, ModelSpec{3.0, 1.0, 1, 1}));
}
BENCHMARK(BM_WkbLevel)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
