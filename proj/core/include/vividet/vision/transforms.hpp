#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vividet/tensor/rng.hpp"
#include "vividet/vision/clip.hpp"

namespace vividet {

/// Source indices selected for a clip of `available` frames resampled to `target`.
/// With enough frames, index i is floor(i * available / target); otherwise frames are used
/// in order and the last one is repeated.
std::vector<std::size_t> sample_indices(std::size_t available, std::size_t target);

std::vector<Frame> sample_frames(std::span<const Frame> raw, std::size_t target);

struct LetterboxGeometry {
  std::size_t content_height = 0;
  std::size_t content_width = 0;
  std::size_t top = 0;
  std::size_t left = 0;
};

/// Placement of an H x W frame scaled by min(S/H, S/W) and centered on an S x S canvas.
LetterboxGeometry letterbox_geometry(std::size_t height, std::size_t width, std::size_t size);

/// Aspect-preserving bilinear resize onto a black S x S canvas. Requires S >= 8.
Frame resize_letterbox(const Frame& frame, std::size_t size);

/// Normalized 1-D Gaussian taps of radius ceil(3 sigma).
std::vector<double> gaussian_kernel(double sigma);

/// Separable Gaussian blur with clamp-to-border edges. Requires sigma > 0.
Frame gaussian_blur(const Frame& frame, double sigma);

/// Rotation about the frame center by `angle_deg` (counter-clockwise as displayed), bilinear,
/// zero outside the source. A 90 degree turn of a square frame maps (r, c) <- (c, n-1-r).
Frame rotate(const Frame& frame, double angle_deg);

enum class FlipAxis { Horizontal, Vertical };

Frame flip(const Frame& frame, FlipAxis axis);

/// Adds i.i.d. U(-amplitude, amplitude) noise and clamps to [0, 1].
Frame perturb_uniform(const Frame& frame, double amplitude, Rng& rng);

/// Resamples to `target_frames` and letterboxes every frame to `size` x `size`.
VideoClip preprocess_clip(const VideoClip& clip, std::size_t target_frames, std::size_t size);

}  // namespace vividet
