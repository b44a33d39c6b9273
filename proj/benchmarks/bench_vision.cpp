#include <benchmark/benchmark.h>

#include "vividet/model/model_check.hpp"
#include "vividet/vision/augment.hpp"
#include "vividet/vision/transforms.hpp"

using namespace vividet;

namespace {

void BM_AugmentClip(benchmark::State& state) {
  Rng rng(1);
  VideoClip clip = random_clip({56, 64, 64, 3}, Label::Violent, rng);
  clip.source_id = "bench";
  AugmentSpec spec;
  for (auto _ : state) {
    ++spec.seed;
    benchmark::DoNotOptimize(augment_clip(clip, spec));
  }
}
BENCHMARK(BM_AugmentClip)->Unit(benchmark::kMillisecond);

void BM_Letterbox(benchmark::State& state) {
  Frame f(288, 360, 3, 0.5f);
  for (auto _ : state) benchmark::DoNotOptimize(resize_letterbox(f, 64));
}
BENCHMARK(BM_Letterbox);

void BM_GaussianBlur(benchmark::State& state) {
  Frame f(64, 64, 3, 0.5f);
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_blur(f, 1.5));
}
BENCHMARK(BM_GaussianBlur);

}  // namespace
