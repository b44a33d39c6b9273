#pragma once

#include <cstdint>

#include "vividet/vision/clip.hpp"

namespace vividet {

/// Ranges the per-clip augmentation parameters are drawn from.
struct AugmentSpec {
  double blur_sigma_lo = 0.5;
  double blur_sigma_hi = 1.5;
  double rotation_lo_deg = -15.0;
  double rotation_hi_deg = 15.0;
  double h_flip_prob = 0.5;
  double v_flip_prob = 0.0;
  double perturb_amplitude = 0.05;
  std::uint64_t seed = 0;

  /// Every draw is a no-op: zero-width ranges at 0, probabilities 0, amplitude 0.
  static AugmentSpec identity(std::uint64_t seed = 0);

  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;
};

/// Parameters sampled once per clip and shared by all of its frames.
struct AugmentDraw {
  double blur_sigma = 0.0;  // 0 disables blur
  double angle_deg = 0.0;
  bool h_flip = false;
  bool v_flip = false;
  std::uint64_t noise_seed = 0;
};

/// Deterministic in (spec, source_id).
AugmentDraw draw_augmentation(const AugmentSpec& spec, const std::string& source_id);

/// Blur, rotation, flips, then uniform noise, with one parameter draw per clip.
/// Output is a pure function of the clip contents and the spec.
VideoClip augment_clip(const VideoClip& clip, const AugmentSpec& spec);

/// Applies an explicit draw.
VideoClip apply_augmentation(const VideoClip& clip, const AugmentDraw& draw, double perturb_amplitude);

}  // namespace vividet
