#include "vividet/vision/augment.hpp"

#include <stdexcept>

#include "vividet/tensor/rng.hpp"
#include "vividet/vision/transforms.hpp"

namespace vividet {

AugmentSpec AugmentSpec::identity(std::uint64_t seed) {
  AugmentSpec s;
  s.blur_sigma_lo = s.blur_sigma_hi = 0.0;
  s.rotation_lo_deg = s.rotation_hi_deg = 0.0;
  s.h_flip_prob = s.v_flip_prob = 0.0;
  s.perturb_amplitude = 0.0;
  s.seed = seed;
  return s;
}

void AugmentSpec::validate() const {
  if (!(blur_sigma_lo >= 0.0 && blur_sigma_lo <= blur_sigma_hi)) {
    throw std::invalid_argument("augment: blur sigma range must satisfy 0 <= lo <= hi");
  }
  if (!(rotation_lo_deg >= -180.0 && rotation_lo_deg <= rotation_hi_deg && rotation_hi_deg <= 180.0)) {
    throw std::invalid_argument("augment: rotation range must satisfy -180 <= lo <= hi <= 180");
  }
  if (!(h_flip_prob >= 0.0 && h_flip_prob <= 1.0 && v_flip_prob >= 0.0 && v_flip_prob <= 1.0)) {
    throw std::invalid_argument("augment: flip probabilities must lie in [0, 1]");
  }
  if (!(perturb_amplitude >= 0.0 && perturb_amplitude <= 0.5)) {
    throw std::invalid_argument("augment: perturb amplitude must lie in [0, 0.5]");
  }
}

AugmentDraw draw_augmentation(const AugmentSpec& spec, const std::string& source_id) {
  spec.validate();
  Rng rng(mix_seed(spec.seed, fnv1a64(source_id)));
  AugmentDraw d;
  // Draw order is fixed: sigma, angle, h-flip, v-flip, noise seed.
  d.blur_sigma = rng.uniform(spec.blur_sigma_lo, spec.blur_sigma_hi);
  d.angle_deg = rng.uniform(spec.rotation_lo_deg, spec.rotation_hi_deg);
  d.h_flip = rng.bernoulli(spec.h_flip_prob);
  d.v_flip = rng.bernoulli(spec.v_flip_prob);
  d.noise_seed = rng.next();
  return d;
}

VideoClip apply_augmentation(const VideoClip& clip, const AugmentDraw& draw, double perturb_amplitude) {
  VideoClip out = clip;
  Rng noise(draw.noise_seed);
  for (Frame& f : out.frames) {
    if (draw.blur_sigma > 0.0) f = gaussian_blur(f, draw.blur_sigma);
    if (draw.angle_deg != 0.0) f = rotate(f, draw.angle_deg);
    if (draw.h_flip) f = flip(f, FlipAxis::Horizontal);
    if (draw.v_flip) f = flip(f, FlipAxis::Vertical);
    if (perturb_amplitude > 0.0) f = perturb_uniform(f, perturb_amplitude, noise);
  }
  return out;
}

VideoClip augment_clip(const VideoClip& clip, const AugmentSpec& spec) {
  return apply_augmentation(clip, draw_augmentation(spec, clip.source_id), spec.perturb_amplitude);
}

}  // namespace vividet
