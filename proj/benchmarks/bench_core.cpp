#include "dcf/capture.hpp"
#include "dcf/markov.hpp"
#include "dcf/phy.hpp"
#include "dcf/sim.hpp"
#include "dcf/solver.hpp"

#include <benchmark/benchmark.h>

using namespace dcf;

static void BM_SolveFixedPoint(benchmark::State& state) {
    ChannelParams ch;
    ch.snr_db = 40.0;
    const TrafficParams tr{static_cast<int>(state.range(0)), 10.0, false};
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_fixed_point(MacParams{}, ch, tr, SolverConfig{}));
    }
}
BENCHMARK(BM_SolveFixedPoint)->Arg(5)->Arg(20)->Arg(100);

static void BM_CaptureSum(benchmark::State& state) {
    const auto cp = CaptureParams::from_channel(ChannelParams{});
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(p_cap(cp, n, 0.02));
    state.SetComplexityN(n);
}
BENCHMARK(BM_CaptureSum)->RangeMultiplier(4)->Range(4, 1024)->Complexity();

static void BM_FadingBer(benchmark::State& state) {
    double g = 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ber_rayleigh({Modulation::dqpsk, g}));
        g = g < 1e4 ? g * 1.7 : 0.5;
    }
}
BENCHMARK(BM_FadingBer);

static void BM_ChainOracle(benchmark::State& state) {
    const ChainInputs c{32, 5, 0.3, 0.5};
    for (auto _ : state) benchmark::DoNotOptimize(build_chain_oracle(c));
}
BENCHMARK(BM_ChainOracle)->Unit(benchmark::kMillisecond);

static void BM_SimSlots(benchmark::State& state) {
    ChannelParams ch;
    ch.snr_db = 40.0;
    World world(MacParams{}, ch, TrafficParams{static_cast<int>(state.range(0)), 0.0, true}, 1);
    for (auto _ : state) benchmark::DoNotOptimize(world.step_slot());
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SimSlots)->Arg(10)->Arg(50);

BENCHMARK_MAIN();
