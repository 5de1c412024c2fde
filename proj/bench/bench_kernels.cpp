// Serial reference kernels against their OpenMP counterparts. The ensemble and
// coherence references run the same arithmetic on one thread. The
// autocorrelation reference is the direct lag sum (the parallel kernel uses
// FFTs for time averaging) and the spectrum reference re-evaluates cosines per
// batch, so those ratios include algorithmic gains. Set OMP_NUM_THREADS to
// the thread count of interest.

#include <benchmark/benchmark.h>

#include "nlbath/dephasing.hpp"
#include "nlbath/ensemble.hpp"
#include "nlbath/spectral.hpp"

using namespace nlbath;

namespace {

const ClassicalBathParams kParams{.gamma1 = 0.4, .temperature = 1.0, .epsilon = 0.05};

EnsembleOptions options(std::size_t n) {
    EnsembleOptions o;
    o.n_realizations = n;
    o.dt = 0.01;
    o.t_max = 50.0;
    o.record_stride = 10;
    o.master_seed = 3;
    return o;
}

const TrajectoryEnsemble& shared_ensemble() {
    static const TrajectoryEnsemble e = simulate_ensemble(kParams, options(1000));
    return e;
}

void BM_Ensemble_Serial(benchmark::State& state) {
    const auto o = options(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(simulate_ensemble_serial(kParams, o));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Ensemble_OpenMP(benchmark::State& state) {
    const auto o = options(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(simulate_ensemble(kParams, o));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool TimeAverage>
void BM_Autocorrelation_Serial(benchmark::State& state) {
    const auto& e = shared_ensemble();
    for (auto _ : state) benchmark::DoNotOptimize(autocorrelation_serial(e, {.time_average = TimeAverage}));
}

template <bool TimeAverage>
void BM_Autocorrelation_OpenMP(benchmark::State& state) {
    const auto& e = shared_ensemble();
    for (auto _ : state) benchmark::DoNotOptimize(autocorrelation(e, {.time_average = TimeAverage}));
}

void BM_Spectrum_Serial(benchmark::State& state) {
    const auto ac = autocorrelation(shared_ensemble());
    const auto grid = default_omega_grid();
    for (auto _ : state) benchmark::DoNotOptimize(spectrum_serial(ac, grid));
}

void BM_Spectrum_OpenMP(benchmark::State& state) {
    const auto ac = autocorrelation(shared_ensemble());
    const auto grid = default_omega_grid();
    for (auto _ : state) benchmark::DoNotOptimize(spectrum(ac, grid));
}

void BM_Coherence_Serial(benchmark::State& state) {
    const auto& e = shared_ensemble();
    for (auto _ : state) benchmark::DoNotOptimize(coherence_series_serial(e));
}

void BM_Coherence_OpenMP(benchmark::State& state) {
    const auto& e = shared_ensemble();
    for (auto _ : state) benchmark::DoNotOptimize(coherence_series(e));
}

} // namespace

BENCHMARK(BM_Ensemble_Serial)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Ensemble_OpenMP)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Autocorrelation_Serial<false>)->Name("BM_Autocorrelation_Serial/ensemble")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Autocorrelation_OpenMP<false>)->Name("BM_Autocorrelation_OpenMP/ensemble")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Autocorrelation_Serial<true>)->Name("BM_Autocorrelation_Serial/time_average")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Autocorrelation_OpenMP<true>)->Name("BM_Autocorrelation_OpenMP/time_average")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Spectrum_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Spectrum_OpenMP)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Coherence_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Coherence_OpenMP)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
