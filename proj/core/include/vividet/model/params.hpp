#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vividet/model/config.hpp"
#include "vividet/tensor/checkpoint.hpp"
#include "vividet/tensor/tensor.hpp"

namespace vividet {

/// Weight matrix [in x out] and bias [out] of a dense layer.
template <typename T>
struct Dense {
  Tensor<T> weight;
  Tensor<T> bias;
};

template <typename T>
struct LayerParams {
  Tensor<T> ln1_gain, ln1_bias;
  // Columns [k * D/h, (k+1) * D/h) of w_q / w_k / w_v belong to head k.
  Tensor<T> w_q, w_k, w_v;
  Tensor<T> w_o;
  Tensor<T> ln2_gain, ln2_bias;
  Dense<T> fc1;  // D -> mlp_ratio * D
  Dense<T> fc2;  // mlp_ratio * D -> D
};

/// Every learnable tensor of the classifier.
template <typename T>
struct ModelParams {
  Dense<T> embed;       // (t*h*w*C) x D
  Tensor<T> cls_token;  // 1 x D
  Tensor<T> pos_embed;  // (N+1) x D, row 0 is the CLS position
  std::vector<LayerParams<T>> layers;
  std::optional<Dense<T>> head_hidden;  // TanhHidden only
  Dense<T> head_out;

  /// Calls fn(name, tensor) for every parameter in canonical order.
  template <typename Fn>
  void visit(Fn&& fn) {
    visit_impl(*this, fn);
  }
  template <typename Fn>
  void visit(Fn&& fn) const {
    visit_impl(*this, fn);
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    visit([&](const std::string&, const Tensor<T>& t) { n += t.numel(); });
    return n;
  }

  template <typename U>
  ModelParams<U> cast() const;

 private:
  template <typename Self, typename Fn>
  static void visit_impl(Self& self, Fn& fn) {
    fn(std::string("embed.weight"), self.embed.weight);
    fn(std::string("embed.bias"), self.embed.bias);
    fn(std::string("cls_token"), self.cls_token);
    fn(std::string("pos_embed"), self.pos_embed);
    for (std::size_t i = 0; i < self.layers.size(); ++i) {
      auto& l = self.layers[i];
      const std::string p = "layer." + std::to_string(i) + ".";
      fn(p + "ln1.gain", l.ln1_gain);
      fn(p + "ln1.bias", l.ln1_bias);
      fn(p + "msa.w_q", l.w_q);
      fn(p + "msa.w_k", l.w_k);
      fn(p + "msa.w_v", l.w_v);
      fn(p + "msa.w_o", l.w_o);
      fn(p + "ln2.gain", l.ln2_gain);
      fn(p + "ln2.bias", l.ln2_bias);
      fn(p + "mlp.fc1.weight", l.fc1.weight);
      fn(p + "mlp.fc1.bias", l.fc1.bias);
      fn(p + "mlp.fc2.weight", l.fc2.weight);
      fn(p + "mlp.fc2.bias", l.fc2.bias);
    }
    if (self.head_hidden) {
      fn(std::string("head.hidden.weight"), self.head_hidden->weight);
      fn(std::string("head.hidden.bias"), self.head_hidden->bias);
      fn(std::string("head.out.weight"), self.head_out.weight);
      fn(std::string("head.out.bias"), self.head_out.bias);
    } else {
      fn(std::string("head.linear.weight"), self.head_out.weight);
      fn(std::string("head.linear.bias"), self.head_out.bias);
    }
  }
};

/// Parameters with every entry zero except layer-norm gains (one).
template <typename T>
ModelParams<T> zero_params(const ModelConfig& config);

/// Dense weights and pos_embed ~ N(0, 0.02) truncated at two standard deviations; biases and
/// cls_token zero; layer-norm gains one. Deterministic per seed.
template <typename T>
ModelParams<T> init_params(const ModelConfig& config, std::uint64_t seed);

/// Throws DimensionError on any shape disagreement with `config`, NumericError on non-finite values.
template <typename T>
void validate_params(const ModelParams<T>& params, const ModelConfig& config);

Checkpoint to_checkpoint(const ModelConfig& config, const ModelParams<float>& params);
std::pair<ModelConfig, ModelParams<float>> from_checkpoint(const Checkpoint& ckpt);

void save_model(const std::filesystem::path& path, const ModelConfig& config, const ModelParams<float>& params);
std::pair<ModelConfig, ModelParams<float>> load_model(const std::filesystem::path& path);

}  // namespace vividet
