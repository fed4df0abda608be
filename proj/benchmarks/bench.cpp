#include <benchmark/benchmark.h>

#include "aoi/censored_moments.hpp"
#include "aoi/optimizer.hpp"
#include "aoi/simulator.hpp"
#include "aoi/system_config.hpp"

namespace {

aoi::SystemConfig exp1(double inv_fmax) {
    return aoi::SystemConfig(aoi::DelayModel::shifted_exponential(10.0, 1.0),
                             aoi::DelayModel::uniform(0.0, 10.0), inv_fmax);
}

void bm_censored_moments(benchmark::State& state) {
    const aoi::SystemConfig cfg = exp1(0.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            aoi::censored_conditional_moments(cfg, 13.0, 8.0));
}
BENCHMARK(bm_censored_moments);

void bm_solve_beta(benchmark::State& state) {
    const aoi::SystemConfig cfg = exp1(14.0);
    const aoi::OptimizerConfig opt;
    for (auto _ : state)
        benchmark::DoNotOptimize(aoi::solve_beta(cfg, 13.0, opt));
}
BENCHMARK(bm_solve_beta);

void bm_search_k_grid(benchmark::State& state) {
    const aoi::SystemConfig cfg = exp1(14.0);
    const aoi::OptimizerConfig opt;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            aoi::search_k(cfg, opt, aoi::SearchMode::Grid));
}
BENCHMARK(bm_search_k_grid)->Unit(benchmark::kMillisecond);

void bm_simulate_early(benchmark::State& state) {
    const aoi::SystemConfig cfg = exp1(0.0);
    aoi::SimConfig sim;
    sim.cycles = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(
            aoi::simulate(cfg, aoi::EarlySampling{13.0, 8.0}, sim));
}
BENCHMARK(bm_simulate_early)->Arg(10000)->Arg(100000)->Unit(
    benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
