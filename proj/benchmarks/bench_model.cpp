#include <benchmark/benchmark.h>

#include "vividet/model/model_check.hpp"
#include "vividet/model/params.hpp"
#include "vividet/model/vivit.hpp"

using namespace vividet;

namespace {

// Reduced model trained by the synthetic learnability run.
ModelConfig reduced_config() {
  ModelConfig c;
  c.input = {16, 32, 32, 1};
  c.tubelet = {4, 8, 8};
  c.embed_dim = 64;
  c.heads = 4;
  c.layers = 4;
  return c;
}

void forward(benchmark::State& state, const ModelConfig& cfg) {
  const auto params = init_params<float>(cfg, 1);
  Rng rng(2);
  const VideoClip clip = random_clip(cfg.input, Label::Violent, rng);
  for (auto _ : state) benchmark::DoNotOptimize(classify(clip, params, cfg));
}

void forward_backward(benchmark::State& state, const ModelConfig& cfg) {
  const auto params = init_params<float>(cfg, 1);
  Rng rng(2);
  const VideoClip clip = random_clip(cfg.input, Label::Violent, rng);
  const std::size_t label = kViolentClass;
  for (auto _ : state) {
    Tape<float> tape;
    const auto vars = bind_params(tape, params, true);
    const auto loss = ad::cross_entropy(forward_logits(tape, clip, vars, cfg), std::span<const std::size_t>(&label, 1));
    benchmark::DoNotOptimize(backward(tape, loss));
  }
}

void BM_ForwardDefault(benchmark::State& s) { forward(s, ModelConfig{}); }
void BM_ForwardReduced(benchmark::State& s) { forward(s, reduced_config()); }
void BM_TrainStepReduced(benchmark::State& s) { forward_backward(s, reduced_config()); }

BENCHMARK(BM_ForwardDefault)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForwardReduced)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrainStepReduced)->Unit(benchmark::kMillisecond);

}  // namespace
