#include <benchmark/benchmark.h>

#include "pame/mapper.hpp"

namespace {

using pame::sampling::Strategy;

void BM_Episode(benchmark::State& state) {
    const pame::mapper::SimParams params;
    const auto strategy = static_cast<Strategy>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(pame::mapper::run_episode(params, strategy, 7, false));
    }
    state.SetLabel(std::string(pame::sampling::to_string(strategy)));
}
BENCHMARK(BM_Episode)
    ->Arg(static_cast<int>(Strategy::uncertainty))
    ->Arg(static_cast<int>(Strategy::random))
    ->Arg(static_cast<int>(Strategy::platform_only))
    ->Unit(benchmark::kMillisecond);

void BM_Step(benchmark::State& state) {
    const pame::mapper::SimParams params;
    const pame::RngStreams streams(3);
    auto s = pame::mapper::initial_state(params, Strategy::uncertainty, streams, true);
    for (int i = 0; i < 20; ++i) s = pame::mapper::step(s, streams, params).state;
    for (auto _ : state) benchmark::DoNotOptimize(pame::mapper::step(s, streams, params));
}
BENCHMARK(BM_Step)->Unit(benchmark::kMicrosecond);

} // namespace
