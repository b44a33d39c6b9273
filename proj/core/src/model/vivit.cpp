#include "vividet/model/vivit.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vividet {

namespace {

template <typename T>
DenseVars<T> bind_dense(Tape<T>& tape, const Dense<T>& d, bool requires_grad) {
  return {tape.leaf(d.weight, requires_grad), tape.leaf(d.bias, requires_grad)};
}

template <typename T>
Var<T> apply_dense(const Var<T>& x, const DenseVars<T>& d) {
  return ad::add_bias(ad::matmul(x, d.weight), d.bias);
}

}  // namespace

template <typename T>
std::vector<Var<T>> ParamVars<T>::leaves() const {
  std::vector<Var<T>> out{embed.weight, embed.bias, cls_token, pos_embed};
  for (const auto& l : layers) {
    out.insert(out.end(), {l.ln1_gain, l.ln1_bias, l.w_q, l.w_k, l.w_v, l.w_o, l.ln2_gain, l.ln2_bias, l.fc1.weight,
                           l.fc1.bias, l.fc2.weight, l.fc2.bias});
  }
  if (head_hidden) out.insert(out.end(), {head_hidden->weight, head_hidden->bias});
  out.insert(out.end(), {head_out.weight, head_out.bias});
  return out;
}

template <typename T>
ParamVars<T> bind_params(Tape<T>& tape, const ModelParams<T>& params, bool requires_grad) {
  ParamVars<T> v;
  v.embed = bind_dense(tape, params.embed, requires_grad);
  v.cls_token = tape.leaf(params.cls_token, requires_grad);
  v.pos_embed = tape.leaf(params.pos_embed, requires_grad);
  for (const auto& l : params.layers) {
    LayerVars<T> lv;
    lv.ln1_gain = tape.leaf(l.ln1_gain, requires_grad);
    lv.ln1_bias = tape.leaf(l.ln1_bias, requires_grad);
    lv.w_q = tape.leaf(l.w_q, requires_grad);
    lv.w_k = tape.leaf(l.w_k, requires_grad);
    lv.w_v = tape.leaf(l.w_v, requires_grad);
    lv.w_o = tape.leaf(l.w_o, requires_grad);
    lv.ln2_gain = tape.leaf(l.ln2_gain, requires_grad);
    lv.ln2_bias = tape.leaf(l.ln2_bias, requires_grad);
    lv.fc1 = bind_dense(tape, l.fc1, requires_grad);
    lv.fc2 = bind_dense(tape, l.fc2, requires_grad);
    v.layers.push_back(lv);
  }
  if (params.head_hidden) v.head_hidden = bind_dense(tape, *params.head_hidden, requires_grad);
  v.head_out = bind_dense(tape, params.head_out, requires_grad);
  return v;
}

template <typename T>
ParamVars<T> vars_from_leaves(std::span<const Var<T>> leaves, const ModelConfig& config) {
  const bool hidden = config.head == HeadVariant::TanhHidden;
  const std::size_t expected = 4 + 12 * config.layers + (hidden ? 4 : 2);
  if (leaves.size() != expected) {
    throw std::invalid_argument("vars_from_leaves: got " + std::to_string(leaves.size()) + " leaves, config needs " +
                                std::to_string(expected));
  }
  std::size_t i = 0;
  const auto next = [&] { return leaves[i++]; };
  ParamVars<T> v;
  v.embed.weight = next();
  v.embed.bias = next();
  v.cls_token = next();
  v.pos_embed = next();
  for (std::size_t l = 0; l < config.layers; ++l) {
    LayerVars<T> lv;
    lv.ln1_gain = next();
    lv.ln1_bias = next();
    lv.w_q = next();
    lv.w_k = next();
    lv.w_v = next();
    lv.w_o = next();
    lv.ln2_gain = next();
    lv.ln2_bias = next();
    lv.fc1.weight = next();
    lv.fc1.bias = next();
    lv.fc2.weight = next();
    lv.fc2.bias = next();
    v.layers.push_back(lv);
  }
  if (hidden) v.head_hidden = DenseVars<T>{next(), next()};
  v.head_out.weight = next();
  v.head_out.bias = next();
  return v;
}

template <typename T>
Tensor<T> extract_tubelets(const VideoClip& clip, const ModelConfig& config) {
  const InputShape& in = config.input;
  if (clip.frame_count() != in.frames || clip.height() != in.height || clip.width() != in.width ||
      clip.channels() != in.channels) {
    throw DimensionError("clip shape " + clip_shape_str(clip) + " does not match model input " +
                         std::to_string(in.frames) + "x" + std::to_string(in.height) + "x" + std::to_string(in.width) +
                         "x" + std::to_string(in.channels));
  }
  const TokenGrid grid = config.grid();
  const TubeletSize& tb = config.tubelet;
  const std::size_t patch = config.patch_dim();
  Tensor<T> out(Shape{grid.count(), patch});
  std::size_t token = 0;
  for (std::size_t it = 0; it < grid.frames; ++it) {
    for (std::size_t ih = 0; ih < grid.height; ++ih) {
      for (std::size_t iw = 0; iw < grid.width; ++iw, ++token) {
        T* row = out.data().data() + token * patch;
        std::size_t k = 0;
        for (std::size_t dt = 0; dt < tb.frames; ++dt) {
          const Frame& f = clip.frames[it * tb.frames + dt];
          for (std::size_t dh = 0; dh < tb.height; ++dh) {
            for (std::size_t dw = 0; dw < tb.width; ++dw) {
              for (std::size_t c = 0; c < in.channels; ++c) {
                row[k++] = static_cast<T>(f.at(ih * tb.height + dh, iw * tb.width + dw, c));
              }
            }
          }
        }
      }
    }
  }
  return out;
}

template <typename T>
Var<T> tubelet_embed(Tape<T>& tape, const VideoClip& clip, const ParamVars<T>& params, const ModelConfig& config) {
  const Var<T> patches = tape.constant(extract_tubelets<T>(clip, config));
  return apply_dense(patches, params.embed);
}

template <typename T>
Var<T> assemble_sequence(const Var<T>& tokens, const ParamVars<T>& params) {
  const std::size_t n = tokens.value().rows();
  if (params.pos_embed.value().rows() != n + 1) {
    throw DimensionError("positional table " + shape_str(params.pos_embed.shape()) + " does not cover " +
                         std::to_string(n) + " tokens plus CLS");
  }
  const Var<T> parts[] = {params.cls_token, tokens};
  return ad::add(ad::concat_rows<T>(parts), params.pos_embed);
}

std::size_t attention_scale_dim(const ModelConfig& config) {
  return config.attention_scale == AttentionScale::PerHeadDim ? config.head_dim() : config.embed_dim;
}

template <typename T>
Var<T> self_attention_head(const Var<T>& y, const Var<T>& w_q, const Var<T>& w_k, const Var<T>& w_v,
                           std::size_t scale_dim, Tensor<T>* attention_out) {
  const Var<T> q = ad::matmul(y, w_q);
  const Var<T> k = ad::matmul(y, w_k);
  const Var<T> v = ad::matmul(y, w_v);
  const T inv_sqrt = T{1} / std::sqrt(static_cast<T>(scale_dim));
  const Var<T> scores = ad::scale(ad::matmul(q, ad::transpose(k)), inv_sqrt);
  const Var<T> attention = ad::softmax(scores);
  if (attention_out) *attention_out = attention.value();
  return ad::matmul(attention, v);
}

template <typename T>
Var<T> msa(const Var<T>& y, const LayerVars<T>& layer, const ModelConfig& config, std::size_t layer_index,
           const ForwardHooks<T>* hooks) {
  const std::size_t dh = config.head_dim();
  const std::size_t scale_dim = attention_scale_dim(config);
  const bool capture = hooks && hooks->on_attention;
  std::vector<Var<T>> heads;
  heads.reserve(config.heads);
  Tensor<T> attention;
  for (std::size_t h = 0; h < config.heads; ++h) {
    const Var<T> q = ad::slice_cols(layer.w_q, h * dh, dh);
    const Var<T> k = ad::slice_cols(layer.w_k, h * dh, dh);
    const Var<T> v = ad::slice_cols(layer.w_v, h * dh, dh);
    heads.push_back(self_attention_head(y, q, k, v, scale_dim, capture ? &attention : nullptr));
    if (capture) hooks->on_attention(layer_index, h, attention);
  }
  const Var<T> joined = config.heads == 1 ? heads.front() : ad::concat_cols<T>(heads);
  return ad::matmul(joined, layer.w_o);
}

template <typename T>
Var<T> encoder_block(const Var<T>& y, const LayerVars<T>& layer, const ModelConfig& config, std::size_t layer_index,
                     const ForwardHooks<T>* hooks) {
  const T eps = static_cast<T>(config.layer_norm_eps);
  const Var<T> attended = msa(ad::layer_norm(y, layer.ln1_gain, layer.ln1_bias, eps), layer, config, layer_index, hooks);
  const Var<T> mid = ad::add(y, attended);
  const Var<T> normed = ad::layer_norm(mid, layer.ln2_gain, layer.ln2_bias, eps);
  const Var<T> mlp = apply_dense(ad::gelu(apply_dense(normed, layer.fc1)), layer.fc2);
  return ad::add(mid, mlp);
}

template <typename T>
Var<T> encode(const Var<T>& sequence, const ParamVars<T>& params, const ModelConfig& config,
              const ForwardHooks<T>* hooks) {
  Var<T> y = sequence;
  for (std::size_t l = 0; l < params.layers.size(); ++l) y = encoder_block(y, params.layers[l], config, l, hooks);
  return y;
}

template <typename T>
Var<T> head_logits(const Var<T>& encoded, const ParamVars<T>& params, const ModelConfig& /*config*/,
                   const ForwardHooks<T>* hooks) {
  if (hooks && hooks->on_final_tokens) hooks->on_final_tokens(encoded.tape()->mutable_value(encoded.id()));
  Var<T> x = ad::slice_rows(encoded, 0, 1);
  if (params.head_hidden) x = ad::tanh(apply_dense(x, *params.head_hidden));
  return apply_dense(x, params.head_out);
}

template <typename T>
Var<T> forward_logits(Tape<T>& tape, const VideoClip& clip, const ParamVars<T>& params, const ModelConfig& config,
                      const ForwardHooks<T>* hooks) {
  const Var<T> tokens = tubelet_embed(tape, clip, params, config);
  const Var<T> seq = assemble_sequence(tokens, params);
  return head_logits(encode(seq, params, config, hooks), params, config, hooks);
}

template <typename T>
std::vector<T> classify(const VideoClip& clip, const ModelParams<T>& params, const ModelConfig& config,
                        const ForwardHooks<T>* hooks) {
  Tape<T> tape;
  tape.set_recording(false);
  const ParamVars<T> vars = bind_params(tape, params, false);
  const Var<T> logits = forward_logits(tape, clip, vars, config, hooks);
  const Tensor<T> probs = softmax(logits.value(), 1);
  return {probs.data().begin(), probs.data().end()};
}

template <typename T>
std::size_t argmax(std::span<const T> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

#define VIVIDET_INSTANTIATE_VIVIT(T)                                                                               \
  template struct ParamVars<T>;                                                                                    \
  template ParamVars<T> bind_params<T>(Tape<T>&, const ModelParams<T>&, bool);                                     \
  template ParamVars<T> vars_from_leaves<T>(std::span<const Var<T>>, const ModelConfig&);                          \
  template Tensor<T> extract_tubelets<T>(const VideoClip&, const ModelConfig&);                                    \
  template Var<T> tubelet_embed<T>(Tape<T>&, const VideoClip&, const ParamVars<T>&, const ModelConfig&);           \
  template Var<T> assemble_sequence<T>(const Var<T>&, const ParamVars<T>&);                                        \
  template Var<T> self_attention_head<T>(const Var<T>&, const Var<T>&, const Var<T>&, const Var<T>&, std::size_t,  \
                                         Tensor<T>*);                                                              \
  template Var<T> msa<T>(const Var<T>&, const LayerVars<T>&, const ModelConfig&, std::size_t,                      \
                         const ForwardHooks<T>*);                                                                  \
  template Var<T> encoder_block<T>(const Var<T>&, const LayerVars<T>&, const ModelConfig&, std::size_t,            \
                                   const ForwardHooks<T>*);                                                        \
  template Var<T> encode<T>(const Var<T>&, const ParamVars<T>&, const ModelConfig&, const ForwardHooks<T>*);       \
  template Var<T> head_logits<T>(const Var<T>&, const ParamVars<T>&, const ModelConfig&, const ForwardHooks<T>*);  \
  template Var<T> forward_logits<T>(Tape<T>&, const VideoClip&, const ParamVars<T>&, const ModelConfig&,           \
                                    const ForwardHooks<T>*);                                                       \
  template std::vector<T> classify<T>(const VideoClip&, const ModelParams<T>&, const ModelConfig&,                 \
                                      const ForwardHooks<T>*);                                                     \
  template std::size_t argmax<T>(std::span<const T>);

VIVIDET_INSTANTIATE_VIVIT(float)
VIVIDET_INSTANTIATE_VIVIT(double)

#undef VIVIDET_INSTANTIATE_VIVIT

}  // namespace vividet
