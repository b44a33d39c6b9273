#pragma once

#include <cstdint>

#include "vividet/model/config.hpp"
#include "vividet/tensor/gradcheck.hpp"
#include "vividet/tensor/rng.hpp"
#include "vividet/vision/clip.hpp"

namespace vividet {

/// T=8, 16x16x1 input, tubelet (4,8,8), D=16, 2 heads, 2 layers.
ModelConfig tiny_model_config();

/// Clip of the config's input shape with pixels uniform in [0, 1).
VideoClip random_clip(const InputShape& input, Label label, Rng& rng);

struct ModelGradCheckSetup {
  ModelConfig config = tiny_model_config();
  std::size_t batch = 2;
  std::uint64_t seed = 1;
  double step = 1e-4;
  GradCheckOptions options;
};

/// 64-bit central-difference check of every parameter of the full model on the mean
/// cross-entropy of `batch` random clips, all labeled Violent.
GradCheckResult check_model_gradients(const ModelGradCheckSetup& setup);

}  // namespace vividet
