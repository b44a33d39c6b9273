#pragma once

#include <cstdint>
#include <vector>

#include "vividet/vision/clip.hpp"

namespace vividet {

/// Desk-scale two-class dataset of moving Gaussian blobs.
struct SyntheticSpec {
  std::size_t clips_per_class = 60;
  std::size_t frame_count = 16;
  std::size_t height = 32;
  std::size_t width = 32;
  std::size_t channels = 1;
  /// Speed multiplier of the abrupt (violent) class relative to the smooth class.
  double motion_gap = 16.0;
  std::uint64_t seed = 7;

  void validate() const;
};

/// NonViolent clips: 2-4 blobs on straight constant-velocity paths.
/// Violent clips: the same kind of blobs converging on a shared point with per-frame random
/// velocity reversals and collision bounces. Clips alternate Violent / NonViolent.
std::vector<VideoClip> generate_synthetic(const SyntheticSpec& spec);

/// Mean absolute pixel change between consecutive frames (0 for single-frame clips).
double mean_interframe_difference(const VideoClip& clip);

}  // namespace vividet
