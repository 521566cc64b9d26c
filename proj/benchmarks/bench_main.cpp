#include <benchmark/benchmark.h>

#include <random>

#include "ttsvd/contract.hpp"
#include "ttsvd/environment.hpp"
#include "ttsvd/solver.hpp"
#include "ttsvd/structured.hpp"

using namespace ttsvd;

namespace {

DenseTensor random_tensor(std::vector<Index> shape, std::uint64_t seed) {
    Index size = 1;
    for (Index e : shape) size *= e;
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> dist;
    std::vector<double> data(static_cast<std::size_t>(size));
    for (double& x : data) x = dist(gen);
    return DenseTensor(std::move(shape), std::move(data));
}

// Args: R, RA, I, K.
void BM_AlsApply(benchmark::State& state) {
    const Index r = state.range(0), ra = state.range(1), i = state.range(2), k = state.range(3);
    const DenseTensor left = random_tensor({r, ra, r}, 1), right = random_tensor({r, ra, r}, 2);
    const DenseTensor a = random_tensor({ra, i, i, ra}, 3), y = random_tensor({r, i, r, k}, 4);
    MacScope macs;
    for (auto _ : state) benchmark::DoNotOptimize(als_apply(left, a, right, y));
    state.counters["macs_per_apply"] = static_cast<double>(macs.elapsed()) / static_cast<double>(state.iterations());
}
BENCHMARK(BM_AlsApply)->Args({5, 2, 2, 10})->Args({10, 2, 2, 10})->Args({20, 4, 2, 10})->Args({40, 4, 2, 10});

// Args: R, RA, I.
void BM_EnvStep(benchmark::State& state) {
    const Index r = state.range(0), ra = state.range(1), i = state.range(2);
    const DenseTensor left = random_tensor({r, ra, r}, 1), u = random_tensor({r, i, r}, 2);
    const DenseTensor a = random_tensor({ra, i, i, ra}, 3), v = random_tensor({r, i, r}, 4);
    for (auto _ : state) benchmark::DoNotOptimize(env_left_step(left, u, a, v));
}
BENCHMARK(BM_EnvStep)->Args({5, 2, 2})->Args({20, 4, 2})->Args({40, 4, 2});

// Arg: N. Full ALS-SVD on the Hilbert submatrix.
void BM_AlsSvdHilbert(benchmark::State& state) {
    const HilbertTT h = hilbert_submatrix_tt(static_cast<int>(state.range(0)), 1e-8);
    SolverConfig cfg;
    cfg.k = 10;
    cfg.epsilon = 1e-6;
    for (auto _ : state) benchmark::DoNotOptimize(als_svd(h.matrix, cfg).sigma);
}
BENCHMARK(BM_AlsSvdHilbert)->Arg(10)->Arg(14)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
