#include <benchmark/benchmark.h>

#include "stokeslab/sampling.hpp"
#include "stokeslab/states.hpp"
#include "stokeslab/stokes.hpp"
#include "stokeslab/witnesses.hpp"

using namespace stokeslab;

static void BM_BuildLocalStokes(benchmark::State &st) {
    const int n_max = static_cast<int>(st.range(0));
    for (auto _ : st) {
        benchmark::DoNotOptimize(build_local_stokes(n_max));
    }
}
BENCHMARK(BM_BuildLocalStokes)->Arg(8)->Arg(20)->Arg(45)->Unit(benchmark::kMillisecond);

static void BM_StokesSetFullSpace(benchmark::State &st) {
    const Truncation t{static_cast<int>(st.range(0))};
    for (auto _ : st) {
        benchmark::DoNotOptimize(stokes_set(Beam::A, t));
    }
}
BENCHMARK(BM_StokesSetFullSpace)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_BsvMoments(benchmark::State &st) {
    const int n_max = static_cast<int>(st.range(0));
    const QuantumState state = bsv({0.8, Truncation{n_max}});
    for (auto _ : st) {
        benchmark::DoNotOptimize(stokes_moments(state));
    }
}
BENCHMARK(BM_BsvMoments)->Arg(10)->Arg(19)->Arg(45)->Unit(benchmark::kMillisecond);

static void BM_NoisyBsvAllWitnesses(benchmark::State &st) {
    const int n_max = static_cast<int>(st.range(0));
    const QuantumState state = mix_white_noise(bsv({1.2, Truncation{n_max}}), {0.7});
    for (auto _ : st) {
        benchmark::DoNotOptimize(eval_all(state));
    }
}
BENCHMARK(BM_NoisyBsvAllWitnesses)->Arg(19)->Arg(45)->Unit(benchmark::kMillisecond);

static void BM_ApplyLoss(benchmark::State &st) {
    const int n_max = static_cast<int>(st.range(0));
    const QuantumState state = bsv({0.5, Truncation{n_max}});
    for (auto _ : st) {
        benchmark::DoNotOptimize(apply_loss(state, {0.8, 0.6}));
    }
}
BENCHMARK(BM_ApplyLoss)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_OutcomeDistribution(benchmark::State &st) {
    const int n_max = static_cast<int>(st.range(0));
    const QuantumState state = bsv({0.5, Truncation{n_max}});
    for (auto _ : st) {
        benchmark::DoNotOptimize(outcome_distribution(state, StokesIndex::diagonal));
    }
}
BENCHMARK(BM_OutcomeDistribution)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_SampleAllBases(benchmark::State &st) {
    const QuantumState state = bsv({0.5, Truncation{10}});
    const auto shots = static_cast<std::size_t>(st.range(0));
    for (auto _ : st) {
        benchmark::DoNotOptimize(sample_all_bases(state, shots, 7));
    }
}
BENCHMARK(BM_SampleAllBases)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

static void BM_BootstrapEstimate(benchmark::State &st) {
    const BasisSamples samples = sample_all_bases(bsv({0.5, Truncation{10}}), 100'000, 7);
    for (auto _ : st) {
        benchmark::DoNotOptimize(estimate_all(samples));
    }
}
BENCHMARK(BM_BootstrapEstimate)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
