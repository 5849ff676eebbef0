#include <benchmark/benchmark.h>

#include <random>

#include "bfkit/filter.hpp"

namespace {

bfkit::Image noisy_slice(int size) {
    std::mt19937_64 gen(7);
    std::normal_distribution<double> noise(40.0, 64.0);
    bfkit::Image img(size, size);
    for (auto& v : img.pixels()) v = bfkit::round_to_sample(noise(gen));
    return img;
}

void BM_FilterSlice(benchmark::State& state) {
    const bfkit::Image img = noisy_slice(512);
    bfkit::FilterConfig cfg;
    cfg.spec = {bfkit::VFamily::Frac, 1.40 / 63.83, bfkit::WFamily::power(), static_cast<int>(state.range(0))};
    cfg.gate = bfkit::GateRange{-100.0, 300.0};
    for (auto _ : state) benchmark::DoNotOptimize(bfkit::filter_image(img, cfg));
}
BENCHMARK(BM_FilterSlice)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
