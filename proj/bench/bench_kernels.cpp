// Serial reference vs OpenMP kernels. Set OMP_NUM_THREADS to compare scaling.

#include "prunebound/kernels.hpp"
#include "prunebound/matrix.hpp"
#include "prunebound/montecarlo.hpp"
#include "prunebound/pruning.hpp"

#include <benchmark/benchmark.h>

using namespace prunebound;

namespace {

void BM_GemmNT(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix a = gaussian_matrix(n, n, 1.0, RngHandle{1, 0});
    const Matrix b = gaussian_matrix(n, n, 1.0, RngHandle{1, 1});
    for (auto _ : state) benchmark::DoNotOptimize(kernels::gemm_nt(a, b));
}

void BM_GemmNTSerial(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix a = gaussian_matrix(n, n, 1.0, RngHandle{1, 0});
    const Matrix b = gaussian_matrix(n, n, 1.0, RngHandle{1, 1});
    for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::gemm_nt(a, b));
}

void BM_PruneMask(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix a = gaussian_matrix(n, n, 1.0, RngHandle{2, 0});
    for (auto _ : state) benchmark::DoNotOptimize(prune_mask(a, 2.0, 1.0, RngHandle{2, 1}));
}

void BM_PruneMaskSerial(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix a = gaussian_matrix(n, n, 1.0, RngHandle{2, 0});
    for (auto _ : state) benchmark::DoNotOptimize(serial::prune_mask(a, 2.0, 1.0, RngHandle{2, 1}));
}

void BM_DeltaMoments(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(mc_delta_moments(2.0, 1.0, static_cast<std::size_t>(state.range(0)), RngHandle{3, 0}));
}

void BM_DeltaMomentsSerial(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(
            serial::mc_delta_moments(2.0, 1.0, static_cast<std::size_t>(state.range(0)), RngHandle{3, 0}));
}

void BM_BallsBins(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(mc_balls_bins(300, 100, static_cast<std::size_t>(state.range(0)), RngHandle{4, 0}));
}

void BM_BallsBinsSerial(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(
            serial::mc_balls_bins(300, 100, static_cast<std::size_t>(state.range(0)), RngHandle{4, 0}));
}

}  // namespace

BENCHMARK(BM_GemmNT)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GemmNTSerial)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PruneMask)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PruneMaskSerial)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DeltaMoments)->Arg(1000000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DeltaMomentsSerial)->Arg(1000000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BallsBins)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BallsBinsSerial)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
