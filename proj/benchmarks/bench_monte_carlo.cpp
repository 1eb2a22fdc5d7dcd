// Benchmarks comparing the OpenMP drivers against their serial reference
// implementations. Both paths produce identical results (enforced by the
// unit tests); these measure only the speedup of the parallel kernels.

#include <benchmark/benchmark.h>

#include "dlms/experiments.hpp"
#include "dlms/theory.hpp"

namespace {

dlms::ExperimentSpec bench_spec() {
    dlms::ExperimentSpec spec = dlms::scenario_43(1);
    spec.trials = 64;
    spec.iterations = 1500;
    return spec;
}

void BM_MonteCarloSerial(benchmark::State& state) {
    const dlms::ExperimentSpec spec = bench_spec();
    for (auto _ : state) {
        const dlms::MSDReport report = dlms::run_monte_carlo_serial(spec);
        benchmark::DoNotOptimize(report.msd.sum());
    }
}
BENCHMARK(BM_MonteCarloSerial)->Unit(benchmark::kMillisecond);

void BM_MonteCarloParallel(benchmark::State& state) {
    const dlms::ExperimentSpec spec = bench_spec();
    const int jobs = static_cast<int>(state.range(0));
    for (auto _ : state) {
        const dlms::MSDReport report = dlms::run_monte_carlo(spec, jobs);
        benchmark::DoNotOptimize(report.msd.sum());
    }
}
BENCHMARK(BM_MonteCarloParallel)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_FourthMomentSampler(benchmark::State& state) {
    const dlms::SignalProfile profile = dlms::sample_profile(2, {0.8, 1.2}, {0.01, 0.05}, 3);
    const int jobs = static_cast<int>(state.range(0));
    for (auto _ : state) {
        const Eigen::MatrixXd k4 = dlms::theory::sampled_fourth_moment(profile, 3, 100000, 7, jobs);
        benchmark::DoNotOptimize(k4.sum());
    }
}
BENCHMARK(BM_FourthMomentSampler)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_TheoryTransient(benchmark::State& state) {
    const dlms::ExperimentSpec spec = bench_spec();
    const dlms::theory::StackedOperators ops = dlms::theory::make_stacked_operators(
        spec.combiner, spec.profile, spec.taps, spec.variants[0]);
    const Eigen::VectorXd& w_o = spec.schedule.stages.front().second;
    for (auto _ : state) {
        const dlms::theory::TransientTrace trace =
            dlms::theory::transient_msd(ops, w_o, 3000);
        benchmark::DoNotOptimize(trace.msd.sum());
    }
}
BENCHMARK(BM_TheoryTransient)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
