#pragma once

#include <cstddef>
#include <string>

namespace vividet {

enum class HeadVariant {
  Linear,      // dense D -> classes
  TanhHidden,  // dense D -> D, tanh, dense D -> classes
};

enum class AttentionScale {
  PerHeadDim,  // scores / sqrt(D / heads)
  FullDim,     // scores / sqrt(D)
};

struct InputShape {
  std::size_t frames = 56;
  std::size_t height = 64;
  std::size_t width = 64;
  std::size_t channels = 3;

  friend bool operator==(const InputShape&, const InputShape&) = default;
};

/// Tubelet extent along time, height and width.
struct TubeletSize {
  std::size_t frames = 8;
  std::size_t height = 8;
  std::size_t width = 8;

  friend bool operator==(const TubeletSize&, const TubeletSize&) = default;
};

struct TokenGrid {
  std::size_t frames = 0;  // n_t
  std::size_t height = 0;  // n_h
  std::size_t width = 0;   // n_w

  std::size_t count() const noexcept { return frames * height * width; }
  friend bool operator==(const TokenGrid&, const TokenGrid&) = default;
};

/// n_t = floor(T/t), n_h = floor(H/h), n_w = floor(W/w); remainder voxels are dropped.
/// Throws std::invalid_argument if a tubelet dimension is zero or exceeds the input.
TokenGrid tubelet_grid(const InputShape& input, const TubeletSize& tubelet);

struct ModelConfig {
  InputShape input;
  TubeletSize tubelet;
  std::size_t embed_dim = 128;
  std::size_t heads = 8;
  std::size_t layers = 8;
  std::size_t mlp_ratio = 4;
  std::size_t classes = 2;
  HeadVariant head = HeadVariant::Linear;
  AttentionScale attention_scale = AttentionScale::PerHeadDim;
  double layer_norm_eps = 1e-6;

  void validate() const;

  TokenGrid grid() const { return tubelet_grid(input, tubelet); }
  std::size_t num_tokens() const { return grid().count(); }
  std::size_t sequence_length() const { return num_tokens() + 1; }
  /// Flattened voxels per tubelet: t * h * w * C.
  std::size_t patch_dim() const { return tubelet.frames * tubelet.height * tubelet.width * input.channels; }
  std::size_t head_dim() const { return embed_dim / heads; }
  std::size_t mlp_dim() const { return embed_dim * mlp_ratio; }

  /// Text form stored in checkpoints ("key=value" lines).
  std::string to_manifest() const;
  static ModelConfig from_manifest(const std::string& text);

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

std::string to_string(HeadVariant v);
std::string to_string(AttentionScale v);
HeadVariant parse_head_variant(const std::string& s);
AttentionScale parse_attention_scale(const std::string& s);

}  // namespace vividet
