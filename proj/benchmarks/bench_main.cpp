#include <benchmark/benchmark.h>

#include <caedge/canny.hpp>
#include <caedge/detector.hpp>
#include <caedge/metrics.hpp>
#include <caedge/pso.hpp>
#include <caedge/synthetic.hpp>

#include <random>

using namespace caedge;

namespace {

// one working-resolution frame, shared across benchmarks
const GrayImage& frame() {
    static const GrayImage img = [] {
        const auto samples = generate_corpus(SynthConfig{1, 481, 321, 1, 6, 0.0});
        return prepare_image(to_grayscale(samples[0].image), 128);
    }();
    return img;
}

DetectorParams params_for(int radius) {
    DetectorParams p;
    p.delta = 112;
    p.tau = 0.39;
    p.mask = decode_rule(radius == 1 ? 42 : 1234567, radius);
    return p;
}

}  // namespace

static void BM_DetectRadius1(benchmark::State& state) {
    const DetectorParams params = params_for(1);
    for (auto _ : state) benchmark::DoNotOptimize(detect_edges(frame(), params));
}
BENCHMARK(BM_DetectRadius1);

static void BM_DetectRadius2(benchmark::State& state) {
    const DetectorParams params = params_for(2);
    for (auto _ : state) benchmark::DoNotOptimize(detect_edges(frame(), params));
}
BENCHMARK(BM_DetectRadius2);

static void BM_Canny(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(canny(frame()));
}
BENCHMARK(BM_Canny);

static void BM_Ssim(benchmark::State& state) {
    const EdgeMap a = detect_edges(frame(), params_for(1));
    const EdgeMap b = canny(frame());
    for (auto _ : state) benchmark::DoNotOptimize(ssim(a, b));
}
BENCHMARK(BM_Ssim);

static void BM_Dsc(benchmark::State& state) {
    const EdgeMap a = detect_edges(frame(), params_for(1));
    const EdgeMap b = canny(frame());
    for (auto _ : state) benchmark::DoNotOptimize(dsc(a, b));
}
BENCHMARK(BM_Dsc);

static void BM_BatchFitness(benchmark::State& state) {
    static const TrainingSet train = [] {
        const auto samples = generate_corpus(SynthConfig{8, 481, 321, 1, 3, 0.2});
        TrainingSet t;
        for (const auto& s : samples) {
            const GrayImage img = prepare_image(to_grayscale(s.image), 128);
            t.push_back({s.id, img, prepare_annotation(s.annotations[0], 128)});
        }
        return t;
    }();
    const std::array<double, 3> position{0.44, 0.39, 0.08};
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(batch_fitness(position, train, 1, threads));
}
BENCHMARK(BM_BatchFitness)->Arg(1)->Arg(4);

BENCHMARK_MAIN();
