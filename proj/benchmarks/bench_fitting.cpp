#include <benchmark/benchmark.h>

#include "twinbeam/fitting.hpp"
#include "twinbeam/measurement.hpp"
#include "twinbeam/tracegen.hpp"

using namespace twinbeam;

static void BM_FitPowerCurve(benchmark::State& state) {
    const auto data = synth_power_dataset({0.0, 8.5, 1.2}, static_cast<std::size_t>(state.range(0)), 0.03, 7);
    const auto init = initial_guess(data);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_power_curve(data, init));
    }
}
BENCHMARK(BM_FitPowerCurve)->Arg(25)->Arg(200);

static void BM_FitDiffSpectrum(benchmark::State& state) {
    TraceGenConfig cfg;
    cfg.jitter_db = 0.2;
    const auto grid = make_grid(cfg);
    const auto model = twin_difference_spectrum(grid, CavityParams{}, DetectionChain{});
    const std::vector<double> excess(grid.size(), 0.0);
    const auto traces = synth_noise_trace(model, excess, cfg);
    const auto spectrum = normalize_to_snl(traces.sum, traces.diff);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_diff_spectrum(spectrum));
    }
}
BENCHMARK(BM_FitDiffSpectrum);

static void BM_SingleBeamSpectrum(benchmark::State& state) {
    TraceGenConfig cfg;
    cfg.n_bins = static_cast<std::size_t>(state.range(0));
    const auto grid = make_grid(cfg);
    for (auto _ : state) {
        benchmark::DoNotOptimize(single_beam_spectrum(grid, CavityParams{}, 8.0));
    }
}
BENCHMARK(BM_SingleBeamSpectrum)->Arg(200)->Arg(4000);

static void BM_GridOracle(benchmark::State& state) {
    const auto data = synth_power_dataset({0.0, 8.5, 1.2}, 25, 0.03, 7);
    const auto objective = [&](double p_th, double eps) {
        return power_curve_objective(data, p_th, eps, Weighting::uniform, 0.0);
    };
    for (auto _ : state) {
        benchmark::DoNotOptimize(grid_search_oracle(objective, {2.0, 15.0, 0.6, 1.8}, 128));
    }
}
BENCHMARK(BM_GridOracle);

BENCHMARK_MAIN();
