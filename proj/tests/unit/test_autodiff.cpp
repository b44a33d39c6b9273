#include <gtest/gtest.h>

#include <cmath>

#include "vividet/model/model_check.hpp"
#include "vividet/model/params.hpp"
#include "vividet/model/vivit.hpp"
#include "vividet/tensor/autodiff.hpp"
#include "vividet/tensor/gradcheck.hpp"
#include "vividet/tensor/rng.hpp"

using namespace vividet;

namespace {

Tensor<double> random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor<double> t(std::move(shape));
  for (auto& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

// Reduces any value to a scalar through a fixed random weighting so every output element matters.
Var<double> weighted_sum(const Var<double>& v, std::uint64_t seed) {
  Rng rng(seed);
  Tensor<double> w(v.shape().empty() ? Shape{1} : v.shape());
  for (auto& x : w.data()) x = rng.uniform(-1, 1);
  if (v.shape().empty()) return ad::mul(v, v.tape()->constant(Tensor<double>::scalar(w[0])));
  return ad::sum(ad::mul(v, v.tape()->constant(w)));
}

double check(const ScalarFunction<double>& f, std::vector<Tensor<double>> params, double step = 1e-5) {
  return check_gradients<double>(f, std::move(params), step).max_rel_error;
}

}  // namespace

TEST(Backward, SumGivesOnes) {
  Tape<double> tape;
  const auto x = tape.leaf(Tensor<double>(Shape{2, 3}, 1.5));
  const auto g = backward(tape, ad::sum(x));
  for (double v : g[x].data()) EXPECT_EQ(v, 1.0);
}

TEST(Backward, ZeroTimesXGivesZero) {
  Tape<double> tape;
  const auto x = tape.leaf(Tensor<double>(Shape{3}, 2.0));
  const auto g = backward(tape, ad::sum(ad::scale(x, 0.0)));
  for (double v : g[x].data()) EXPECT_EQ(v, 0.0);
}

TEST(Backward, UnreachedLeafGetsZeros) {
  Tape<double> tape;
  const auto x = tape.leaf(Tensor<double>(Shape{2}, 1.0));
  const auto unused = tape.leaf(Tensor<double>(Shape{4}, 3.0));
  const auto g = backward(tape, ad::sum(x));
  ASSERT_TRUE(g.contains(unused));
  EXPECT_EQ(g[unused], Tensor<double>(Shape{4}, 0.0));
}

TEST(Backward, TwoConsumersAccumulate) {
  // y = x * x + 3 x, dy/dx = 2x + 3; x feeds mul twice and scale once.
  Tape<double> tape;
  const auto x = tape.leaf(Tensor<double>(Shape{2}, std::vector<double>{1.0, -2.0}));
  const auto y = ad::add(ad::mul(x, x), ad::scale(x, 3.0));
  const auto g = backward(tape, ad::sum(y));
  EXPECT_DOUBLE_EQ(g[x][0], 5.0);
  EXPECT_DOUBLE_EQ(g[x][1], -1.0);
}

TEST(Backward, Errors) {
  Tape<double> a, b;
  const auto x = a.leaf(Tensor<double>(Shape{2}, 1.0));
  const auto s = ad::sum(x);
  EXPECT_THROW(backward(b, s), std::invalid_argument);
  EXPECT_THROW(backward(a, x), DimensionError);
  const auto c = a.constant(Tensor<double>(Shape{2}, 1.0));
  const auto g = backward(a, s);
  EXPECT_THROW(g[c], std::out_of_range);
}

TEST(Backward, NoRecordingStoresNoGradients) {
  Tape<double> tape;
  tape.set_recording(false);
  const auto x = tape.leaf(Tensor<double>(Shape{2}, 1.0));
  EXPECT_FALSE(x.requires_grad());
  const auto y = ad::sum(ad::mul(x, x));
  EXPECT_FALSE(y.requires_grad());
  EXPECT_DOUBLE_EQ(y.value().item(), 2.0);
}

TEST(GradCheck, AnalyticCases) {
  const ScalarFunction<double> sq = [](Tape<double>&, std::span<const Var<double>> p) {
    return ad::sum(ad::mul(p[0], p[0]));
  };
  const auto r = check_gradients<double>(sq, {Tensor<double>(Shape{2}, std::vector<double>{1, 2})}, 1e-5);
  EXPECT_LE(r.max_rel_error, 1e-8);
  EXPECT_EQ(r.coordinates_checked, 2u);

  const ScalarFunction<double> constant = [](Tape<double>& t, std::span<const Var<double>> p) {
    return ad::sum(ad::scale(p[0], 0.0));
    (void)t;
  };
  EXPECT_EQ(check_gradients<double>(constant, {Tensor<double>(Shape{3}, 1.0)}, 1e-5).max_rel_error, 0.0);
}

TEST(GradCheck, DetectsNonDeterminism) {
  int calls = 0;
  const ScalarFunction<double> flaky = [&](Tape<double>& t, std::span<const Var<double>> p) {
    ++calls;
    return ad::add(ad::sum(p[0]), t.constant(Tensor<double>::scalar(calls)));
  };
  EXPECT_THROW(check_gradients<double>(flaky, {Tensor<double>(Shape{2}, 1.0)}, 1e-5), std::logic_error);
}

TEST(GradCheck, SamplesLargeTensors) {
  const ScalarFunction<double> f = [](Tape<double>&, std::span<const Var<double>> p) {
    return ad::sum(ad::mul(p[0], p[0]));
  };
  GradCheckOptions opt;
  opt.full_check_limit = 10;
  opt.sample_count = 7;
  const auto r = check_gradients<double>(f, {Tensor<double>(Shape{20}, 0.5)}, 1e-5, opt);
  EXPECT_EQ(r.coordinates_checked, 7u);
}

TEST(GradCheck, EveryOpOnSmallRandomTensors) {
  Rng rng(99);
  const auto A = random_tensor({3, 4}, rng), B = random_tensor({4, 2}, rng), C = random_tensor({3, 4}, rng);
  const auto bias = random_tensor({4}, rng), gain = random_tensor({4}, rng, 0.5, 1.5);

  const std::vector<std::pair<const char*, std::pair<ScalarFunction<double>, std::vector<Tensor<double>>>>> cases = {
      {"matmul", {[](Tape<double>&, std::span<const Var<double>> p) { return weighted_sum(ad::matmul(p[0], p[1]), 1); },
                  {A, B}}},
      {"add", {[](Tape<double>&, std::span<const Var<double>> p) { return weighted_sum(ad::add(p[0], p[1]), 2); },
               {A, C}}},
      {"add_bias",
       {[](Tape<double>&, std::span<const Var<double>> p) { return weighted_sum(ad::add_bias(p[0], p[1]), 3); },
        {A, bias}}},
      {"mul", {[](Tape<double>&, std::span<const Var<double>> p) { return weighted_sum(ad::mul(p[0], p[1]), 4); },
               {A, C}}},
      {"scale", {[](Tape<double>&, std::span<const Var<double>> p) { return weighted_sum(ad::scale(p[0], -1.7), 5); },
                 {A}}},
      {"transpose",
       {[](Tape<double>&, std::span<const Var<double>> p) { return weighted_sum(ad::transpose(p[0]), 6); }, {A}}},
      {"reshape",
       {[](Tape<double>&, std::span<const Var<double>> p) { return weighted_sum(ad::reshape(p[0], {2, 6}), 7); },
        {A}}},
      {"gelu", {[](Tape<double>&, std::span<const Var<double>> p) { return weighted_sum(ad::gelu(p[0]), 8); }, {A}}},
      {"tanh", {[](Tape<double>&, std::span<const Var<double>> p) { return weighted_sum(ad::tanh(p[0]), 9); }, {A}}},
      {"softmax",
       {[](Tape<double>&, std::span<const Var<double>> p) { return weighted_sum(ad::softmax(p[0]), 10); }, {A}}},
      {"layer_norm",
       {[](Tape<double>&, std::span<const Var<double>> p) {
          return weighted_sum(ad::layer_norm(p[0], p[1], p[2], 1e-6), 11);
        },
        {A, gain, bias}}},
      {"slice_cols",
       {[](Tape<double>&, std::span<const Var<double>> p) { return weighted_sum(ad::slice_cols(p[0], 1, 2), 12); },
        {A}}},
      {"slice_rows",
       {[](Tape<double>&, std::span<const Var<double>> p) { return weighted_sum(ad::slice_rows(p[0], 1, 2), 13); },
        {A}}},
      {"concat_cols",
       {[](Tape<double>&, std::span<const Var<double>> p) {
          const Var<double> parts[] = {p[0], p[1]};
          return weighted_sum(ad::concat_cols(std::span<const Var<double>>(parts)), 14);
        },
        {A, C}}},
      {"concat_rows",
       {[](Tape<double>&, std::span<const Var<double>> p) {
          const Var<double> parts[] = {p[0], p[1]};
          return weighted_sum(ad::concat_rows(std::span<const Var<double>>(parts)), 15);
        },
        {A, C}}},
      {"cross_entropy",
       {[](Tape<double>&, std::span<const Var<double>> p) {
          static const std::size_t labels[] = {0, 3, 1};
          return ad::cross_entropy(p[0], std::span<const std::size_t>(labels));
        },
        {A}}},
  };
  for (const auto& [name, c] : cases) EXPECT_LE(check(c.first, c.second), 1e-5) << name;
}

TEST(GradCheck, SingleEncoderBlock) {
  ModelConfig cfg = tiny_model_config();
  cfg.layers = 1;
  const ModelParams<double> params = init_params<double>(cfg, 4);
  Rng rng(8);
  const auto input = random_tensor({cfg.sequence_length(), cfg.embed_dim}, rng);
  std::vector<Tensor<double>> tensors{input};
  const auto& l = params.layers[0];
  for (const auto* t : {&l.ln1_gain, &l.ln1_bias, &l.w_q, &l.w_k, &l.w_v, &l.w_o, &l.ln2_gain, &l.ln2_bias,
                        &l.fc1.weight, &l.fc1.bias, &l.fc2.weight, &l.fc2.bias}) {
    tensors.push_back(*t);
  }
  // Larger weights than the initializer so attention is far from uniform.
  for (std::size_t i = 3; i <= 6; ++i)
    for (auto& v : tensors[i].data()) v *= 20.0;
  const ScalarFunction<double> f = [&](Tape<double>&, std::span<const Var<double>> p) {
    LayerVars<double> lv{p[1], p[2], p[3], p[4], p[5], p[6], p[7], p[8], {p[9], p[10]}, {p[11], p[12]}};
    return weighted_sum(encoder_block(p[0], lv, cfg), 21);
  };
  // Step 1e-5 is roundoff-limited on the smallest gradients (~3e-6) of this block.
  EXPECT_LE(check(f, tensors, 1e-4), 1e-5);
}

TEST(GradCheck, TinyModelEndToEnd) {
  ModelGradCheckSetup setup;
  setup.options.full_check_limit = 256;
  setup.options.sample_count = 64;
  const auto r = check_model_gradients(setup);
  EXPECT_LE(r.max_rel_error, 1e-3);
}
