#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "vividet/model/config.hpp"
#include "vividet/model/params.hpp"
#include "vividet/tensor/autodiff.hpp"
#include "vividet/vision/clip.hpp"

namespace vividet {

/// Optional instrumentation for a forward pass.
template <typename T>
struct ForwardHooks {
  /// Called with each (N+1) x (N+1) attention matrix.
  std::function<void(std::size_t layer, std::size_t head, const Tensor<T>& attention)> on_attention;
  /// May edit the final (N+1) x D sequence before the classification head reads it.
  std::function<void(Tensor<T>& tokens)> on_final_tokens;
};

template <typename T>
struct DenseVars {
  Var<T> weight, bias;
};

template <typename T>
struct LayerVars {
  Var<T> ln1_gain, ln1_bias, w_q, w_k, w_v, w_o, ln2_gain, ln2_bias;
  DenseVars<T> fc1, fc2;
};

/// ModelParams bound to tape leaves.
template <typename T>
struct ParamVars {
  DenseVars<T> embed;
  Var<T> cls_token, pos_embed;
  std::vector<LayerVars<T>> layers;
  std::optional<DenseVars<T>> head_hidden;
  DenseVars<T> head_out;

  /// Leaves in the same canonical order as ModelParams::visit.
  std::vector<Var<T>> leaves() const;
};

template <typename T>
ParamVars<T> bind_params(Tape<T>& tape, const ModelParams<T>& params, bool requires_grad);

/// Inverse of ParamVars::leaves(). Throws std::invalid_argument on a count mismatch with `config`.
template <typename T>
ParamVars<T> vars_from_leaves(std::span<const Var<T>> leaves, const ModelConfig& config);

/// N x (t*h*w*C) matrix of flattened tubelets. Tokens are ordered time-major, then height, then
/// width; voxels inside a tubelet are flattened in (time, height, width, channel) order.
/// Throws DimensionError if the clip does not match config.input.
template <typename T>
Tensor<T> extract_tubelets(const VideoClip& clip, const ModelConfig& config);

/// Linear projection of each tubelet to a D-vector: N x D.
template <typename T>
Var<T> tubelet_embed(Tape<T>& tape, const VideoClip& clip, const ParamVars<T>& params, const ModelConfig& config);

/// [cls; tokens] + pos_embed: (N+1) x D.
template <typename T>
Var<T> assemble_sequence(const Var<T>& tokens, const ParamVars<T>& params);

/// softmax(y W_q (y W_k)^T / sqrt(scale_dim)) y W_v for one head's weight slices.
template <typename T>
Var<T> self_attention_head(const Var<T>& y, const Var<T>& w_q, const Var<T>& w_k, const Var<T>& w_v,
                           std::size_t scale_dim, Tensor<T>* attention_out = nullptr);

/// Dimension the attention scores are divided by the square root of.
std::size_t attention_scale_dim(const ModelConfig& config);

/// Heads over contiguous column slices of w_q / w_k / w_v, concatenated in head order, times w_o.
template <typename T>
Var<T> msa(const Var<T>& y, const LayerVars<T>& layer, const ModelConfig& config, std::size_t layer_index = 0,
           const ForwardHooks<T>* hooks = nullptr);

/// Y = y + MSA(LN(y)); out = Y + MLP(LN(Y)) with MLP = fc2(gelu(fc1(.))).
template <typename T>
Var<T> encoder_block(const Var<T>& y, const LayerVars<T>& layer, const ModelConfig& config,
                     std::size_t layer_index = 0, const ForwardHooks<T>* hooks = nullptr);

/// All encoder blocks in order.
template <typename T>
Var<T> encode(const Var<T>& sequence, const ParamVars<T>& params, const ModelConfig& config,
              const ForwardHooks<T>* hooks = nullptr);

/// 1 x classes logits from row 0 (the CLS / context token) of the encoded sequence.
template <typename T>
Var<T> head_logits(const Var<T>& encoded, const ParamVars<T>& params, const ModelConfig& config,
                   const ForwardHooks<T>* hooks = nullptr);

/// Full forward pass of one clip: 1 x classes logits.
template <typename T>
Var<T> forward_logits(Tape<T>& tape, const VideoClip& clip, const ParamVars<T>& params, const ModelConfig& config,
                      const ForwardHooks<T>* hooks = nullptr);

/// Class probabilities (index 0 Violent, 1 NonViolent for the two-class model).
template <typename T>
std::vector<T> classify(const VideoClip& clip, const ModelParams<T>& params, const ModelConfig& config,
                        const ForwardHooks<T>* hooks = nullptr);

/// Index of the largest entry; ties resolve to the lowest index.
template <typename T>
std::size_t argmax(std::span<const T> values);

}  // namespace vividet
