#include <benchmark/benchmark.h>

#include "vividet/tensor/ops.hpp"
#include "vividet/tensor/rng.hpp"

using namespace vividet;

namespace {

Tensor<float> random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  Rng rng(seed);
  Tensor<float> t(Shape{r, c});
  for (auto& v : t.data()) v = static_cast<float>(rng.uniform(-1, 1));
  return t;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_matrix(n, n, 1), b = random_matrix(n, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(64)->Arg(128)->Arg(256);

// Token projection shape of the default model: 448 tubelets of 1536 voxels to D=128.
void BM_EmbedProjection(benchmark::State& state) {
  const auto x = random_matrix(448, 1536, 3), w = random_matrix(1536, 128, 4);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(x, w));
}
BENCHMARK(BM_EmbedProjection);

void BM_SoftmaxRows(benchmark::State& state) {
  const auto x = random_matrix(449, 449, 5);
  for (auto _ : state) benchmark::DoNotOptimize(softmax(x, 1));
}
BENCHMARK(BM_SoftmaxRows);

}  // namespace
