// Serial reference against the OpenMP kernels on uniform chains.

#include <benchmark/benchmark.h>

#include <map>
#include <numeric>
#include <vector>

#include "resolvent/bath.hpp"
#include "resolvent/kernels.hpp"

using namespace resolvent;

namespace {

const SpectralData& chain(std::size_t n)
{
    static std::map<std::size_t, SpectralData> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, diagonalize_bath(build_uniform_chain(n, 0.0, 1.0))).first;
    }
    return it->second;
}

const cplx kZ(2.5, 0.1);

template <kernels::Backend B>
void green_matrix(benchmark::State& state)
{
    const SpectralData& s = chain(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::green_matrix(s, kZ, 1, B));
    }
    state.SetComplexityN(state.range(0));
}

template <kernels::Backend B>
void green_columns(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const SpectralData& s = chain(n);
    std::vector<Site> sites(16);
    std::iota(sites.begin(), sites.end(), Site{n / 4});
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::green_columns(s, kZ, sites, 1, B));
    }
}

} // namespace

BENCHMARK(green_matrix<kernels::Backend::serial>)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);
BENCHMARK(green_matrix<kernels::Backend::openmp>)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);
BENCHMARK(green_columns<kernels::Backend::serial>)->RangeMultiplier(2)->Range(64, 1024)->Unit(benchmark::kMicrosecond);
BENCHMARK(green_columns<kernels::Backend::openmp>)->RangeMultiplier(2)->Range(64, 1024)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
