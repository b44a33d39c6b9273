#include "vividet/model/params.hpp"

#include <cmath>
#include <map>

#include "vividet/tensor/ops.hpp"
#include "vividet/tensor/rng.hpp"

namespace vividet {

namespace {

template <typename T>
Dense<T> dense(std::size_t in, std::size_t out) {
  return {Tensor<T>(Shape{in, out}), Tensor<T>(Shape{out})};
}

template <typename T>
void fill_truncated_normal(Tensor<T>& t, Rng& rng, double std) {
  for (auto& v : t.data()) v = static_cast<T>(rng.truncated_normal(std));
}

constexpr double kInitStd = 0.02;

}  // namespace

template <typename T>
template <typename U>
ModelParams<U> ModelParams<T>::cast() const {
  auto cd = [](const Dense<T>& d) { return Dense<U>{d.weight.template cast<U>(), d.bias.template cast<U>()}; };
  ModelParams<U> out;
  out.embed = cd(embed);
  out.cls_token = cls_token.template cast<U>();
  out.pos_embed = pos_embed.template cast<U>();
  for (const auto& l : layers) {
    LayerParams<U> o;
    o.ln1_gain = l.ln1_gain.template cast<U>();
    o.ln1_bias = l.ln1_bias.template cast<U>();
    o.w_q = l.w_q.template cast<U>();
    o.w_k = l.w_k.template cast<U>();
    o.w_v = l.w_v.template cast<U>();
    o.w_o = l.w_o.template cast<U>();
    o.ln2_gain = l.ln2_gain.template cast<U>();
    o.ln2_bias = l.ln2_bias.template cast<U>();
    o.fc1 = cd(l.fc1);
    o.fc2 = cd(l.fc2);
    out.layers.push_back(std::move(o));
  }
  if (head_hidden) out.head_hidden = cd(*head_hidden);
  out.head_out = cd(head_out);
  return out;
}

template <typename T>
ModelParams<T> zero_params(const ModelConfig& config) {
  config.validate();
  const std::size_t d = config.embed_dim;
  ModelParams<T> p;
  p.embed = dense<T>(config.patch_dim(), d);
  p.cls_token = Tensor<T>(Shape{1, d});
  p.pos_embed = Tensor<T>(Shape{config.sequence_length(), d});
  p.layers.resize(config.layers);
  for (auto& l : p.layers) {
    l.ln1_gain = Tensor<T>(Shape{d}, T{1});
    l.ln1_bias = Tensor<T>(Shape{d});
    l.w_q = Tensor<T>(Shape{d, d});
    l.w_k = Tensor<T>(Shape{d, d});
    l.w_v = Tensor<T>(Shape{d, d});
    l.w_o = Tensor<T>(Shape{d, d});
    l.ln2_gain = Tensor<T>(Shape{d}, T{1});
    l.ln2_bias = Tensor<T>(Shape{d});
    l.fc1 = dense<T>(d, config.mlp_dim());
    l.fc2 = dense<T>(config.mlp_dim(), d);
  }
  if (config.head == HeadVariant::TanhHidden) p.head_hidden = dense<T>(d, d);
  p.head_out = dense<T>(d, config.classes);
  return p;
}

template <typename T>
ModelParams<T> init_params(const ModelConfig& config, std::uint64_t seed) {
  ModelParams<T> p = zero_params<T>(config);
  Rng rng(seed);
  p.visit([&](const std::string& name, Tensor<T>& t) {
    const bool is_matrix = t.rank() == 2 && name != "cls_token";
    if (is_matrix) fill_truncated_normal(t, rng, kInitStd);
  });
  return p;
}

template <typename T>
void validate_params(const ModelParams<T>& params, const ModelConfig& config) {
  if (params.layers.size() != config.layers) {
    throw DimensionError("parameter set has " + std::to_string(params.layers.size()) + " layers, config expects " +
                         std::to_string(config.layers));
  }
  if (params.head_hidden.has_value() != (config.head == HeadVariant::TanhHidden)) {
    throw DimensionError("parameter head variant does not match config head '" + to_string(config.head) + "'");
  }
  std::map<std::string, Shape> expected;
  zero_params<T>(config).visit([&](const std::string& name, const Tensor<T>& t) { expected[name] = t.shape(); });
  params.visit([&](const std::string& name, const Tensor<T>& t) {
    const Shape& want = expected.at(name);
    if (t.shape() != want) {
      throw DimensionError("parameter " + name + " has shape " + shape_str(t.shape()) + ", expected " + shape_str(want));
    }
    check_finite(t, name);
  });
}

Checkpoint to_checkpoint(const ModelConfig& config, const ModelParams<float>& params) {
  validate_params(params, config);
  Checkpoint ckpt;
  ckpt.manifest = config.to_manifest();
  params.visit([&](const std::string& name, const Tensor<float>& t) { ckpt.tensors.push_back({name, t}); });
  return ckpt;
}

std::pair<ModelConfig, ModelParams<float>> from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.manifest.empty()) throw FormatError("checkpoint has no model manifest");
  ModelConfig config = ModelConfig::from_manifest(ckpt.manifest);
  ModelParams<float> params = zero_params<float>(config);
  std::size_t matched = 0;
  params.visit([&](const std::string& name, Tensor<float>& t) {
    const Tensor<float>* stored = ckpt.find(name);
    if (!stored) throw FormatError("checkpoint is missing tensor " + name);
    if (stored->shape() != t.shape()) {
      throw FormatError("checkpoint tensor " + name + " has shape " + shape_str(stored->shape()) + ", expected " +
                        shape_str(t.shape()));
    }
    t = *stored;
    ++matched;
  });
  if (matched != ckpt.tensors.size()) throw FormatError("checkpoint contains tensors the model does not use");
  return {config, std::move(params)};
}

void save_model(const std::filesystem::path& path, const ModelConfig& config, const ModelParams<float>& params) {
  write_checkpoint(path, to_checkpoint(config, params));
}

std::pair<ModelConfig, ModelParams<float>> load_model(const std::filesystem::path& path) {
  return from_checkpoint(read_checkpoint(path));
}

template struct ModelParams<float>;
template struct ModelParams<double>;
template ModelParams<double> ModelParams<float>::cast<double>() const;
template ModelParams<float> ModelParams<double>::cast<float>() const;
template ModelParams<float> ModelParams<float>::cast<float>() const;
template ModelParams<double> ModelParams<double>::cast<double>() const;
template ModelParams<float> zero_params<float>(const ModelConfig&);
template ModelParams<double> zero_params<double>(const ModelConfig&);
template ModelParams<float> init_params<float>(const ModelConfig&, std::uint64_t);
template ModelParams<double> init_params<double>(const ModelConfig&, std::uint64_t);
template void validate_params<float>(const ModelParams<float>&, const ModelConfig&);
template void validate_params<double>(const ModelParams<double>&, const ModelConfig&);

}  // namespace vividet
