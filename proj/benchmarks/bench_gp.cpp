#include <cmath>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "pame/gp.hpp"

namespace {

struct Data {
    std::vector<double> x;
    std::vector<double> y;
};

Data make_data(std::size_t n) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> pos(0.0, 10000.0);
    std::normal_distribution<double> noise(0.0, 0.03);
    Data d;
    for (std::size_t i = 0; i < n; ++i) {
        d.x.push_back(pos(rng));
        d.y.push_back(0.5 + 0.3 * std::sin(d.x.back() / 700.0) + noise(rng));
    }
    return d;
}

void BM_Fit(benchmark::State& state) {
    const auto d = make_data(static_cast<std::size_t>(state.range(0)));
    const pame::gp::GpHyperparams h;
    for (auto _ : state) benchmark::DoNotOptimize(pame::gp::fit(d.x, d.y, h));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Fit)->RangeMultiplier(2)->Range(16, 512)->Complexity(benchmark::oNCubed);

void BM_PosteriorGrid(benchmark::State& state) {
    const auto d = make_data(static_cast<std::size_t>(state.range(0)));
    const auto model = pame::gp::fit(d.x, d.y, {});
    std::vector<double> grid;
    for (int i = 0; i <= 1000; ++i) grid.push_back(10.0 * i);
    for (auto _ : state) benchmark::DoNotOptimize(pame::gp::posterior(model, grid));
}
BENCHMARK(BM_PosteriorGrid)->RangeMultiplier(2)->Range(16, 512);

void BM_Search(benchmark::State& state) {
    const auto d = make_data(static_cast<std::size_t>(state.range(0)));
    const pame::gp::GpHyperparams init;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pame::gp::search_hyperparameters(d.x, d.y, init, {}));
    }
}
BENCHMARK(BM_Search)->RangeMultiplier(4)->Range(16, 256);

} // namespace
