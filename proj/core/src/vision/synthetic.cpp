#include "vividet/vision/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "vividet/tensor/rng.hpp"

namespace vividet {

namespace {

struct Blob {
  double y = 0, x = 0;
  double vy = 0, vx = 0;
  double sigma = 1;
  double amplitude = 1;
  std::vector<double> tint;
};

void reflect_inside(double& pos, double& vel, double extent) {
  const double hi = extent - 1.0;
  if (pos < 0.0) {
    pos = -pos;
    vel = -vel;
  } else if (pos > hi) {
    pos = 2.0 * hi - pos;
    vel = -vel;
  }
  pos = std::clamp(pos, 0.0, hi);
}

Frame render(const std::vector<Blob>& blobs, const SyntheticSpec& spec) {
  Frame f(spec.height, spec.width, spec.channels, 0.0f);
  for (std::size_t r = 0; r < spec.height; ++r) {
    for (std::size_t c = 0; c < spec.width; ++c) {
      for (std::size_t ch = 0; ch < spec.channels; ++ch) {
        double v = 0.0;
        for (const Blob& b : blobs) {
          const double dy = static_cast<double>(r) - b.y, dx = static_cast<double>(c) - b.x;
          v += b.amplitude * b.tint[ch] * std::exp(-(dy * dy + dx * dx) / (2.0 * b.sigma * b.sigma));
        }
        f.at(r, c, ch) = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  return f;
}

VideoClip make_clip(const SyntheticSpec& spec, bool violent, std::size_t index) {
  Rng rng(mix_seed(spec.seed, (static_cast<std::uint64_t>(index) << 1) | (violent ? 1U : 0U)));
  const double h = static_cast<double>(spec.height), w = static_cast<double>(spec.width);
  const double scale = std::min(h, w);

  std::vector<Blob> blobs(2 + rng.below(3));
  double cy = 0, cx = 0;
  for (Blob& b : blobs) {
    b.y = rng.uniform(0.2, 0.8) * (h - 1.0);
    b.x = rng.uniform(0.2, 0.8) * (w - 1.0);
    b.sigma = rng.uniform(0.06, 0.10) * scale;
    b.amplitude = rng.uniform(0.6, 1.0);
    const double speed = rng.uniform(0.2, 0.6) * scale / 32.0;
    const double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
    b.vy = speed * std::sin(heading);
    b.vx = speed * std::cos(heading);
    b.tint.resize(spec.channels);
    for (auto& t : b.tint) t = spec.channels == 1 ? 1.0 : rng.uniform(0.5, 1.0);
    cy += b.y;
    cx += b.x;
  }
  cy /= static_cast<double>(blobs.size());
  cx /= static_cast<double>(blobs.size());

  VideoClip clip;
  clip.label = violent ? Label::Violent : Label::NonViolent;
  char id[48];
  std::snprintf(id, sizeof id, "%s_%04zu", violent ? "violent" : "nonviolent", index);
  clip.source_id = id;
  clip.frames.reserve(spec.frame_count);

  for (std::size_t t = 0; t < spec.frame_count; ++t) {
    clip.frames.push_back(render(blobs, spec));
    if (violent) {
      for (Blob& b : blobs) {
        // Head toward the shared collision point at the boosted speed, then randomly reverse.
        const double base = std::hypot(b.vy, b.vx) * spec.motion_gap;
        const double dist = std::max(std::hypot(cy - b.y, cx - b.x), 1e-6);
        const double uy = (cy - b.y) / dist, ux = (cx - b.x) / dist;
        const double jitter = rng.uniform(-0.5, 0.5);
        const double dy = uy + jitter * ux, dx = ux - jitter * uy;
        const double norm = std::max(std::hypot(dy, dx), 1e-6);
        double vy = base * dy / norm, vx = base * dx / norm;
        if (rng.bernoulli(0.5)) {
          vy = -vy;
          vx = -vx;
        }
        b.y += vy;
        b.x += vx;
      }
      for (std::size_t i = 0; i < blobs.size(); ++i) {
        for (std::size_t j = i + 1; j < blobs.size(); ++j) {
          Blob& a = blobs[i];
          Blob& c = blobs[j];
          const double dy = a.y - c.y, dx = a.x - c.x;
          const double d = std::hypot(dy, dx);
          if (d < a.sigma + c.sigma) {
            // Collision: push the pair apart along the line joining them.
            const double push = (a.sigma + c.sigma - d) * 0.5 + rng.uniform(0.5, 1.5);
            const double uy = d > 1e-6 ? dy / d : 1.0, ux = d > 1e-6 ? dx / d : 0.0;
            a.y += uy * push;
            a.x += ux * push;
            c.y -= uy * push;
            c.x -= ux * push;
          }
        }
      }
      for (Blob& b : blobs) {
        // Velocities are redrawn every frame, so the reflected sign is not kept.
        double vy = 0, vx = 0;
        reflect_inside(b.y, vy, h);
        reflect_inside(b.x, vx, w);
      }
    } else {
      for (Blob& b : blobs) {
        b.y += b.vy;
        b.x += b.vx;
        reflect_inside(b.y, b.vy, h);
        reflect_inside(b.x, b.vx, w);
      }
    }
  }
  return clip;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (clips_per_class == 0) throw std::invalid_argument("synthetic: clips_per_class must be at least 1");
  if (frame_count == 0 || height == 0 || width == 0 || channels == 0) {
    throw std::invalid_argument("synthetic: dimensions must be positive");
  }
  if (!(motion_gap > 0.0)) throw std::invalid_argument("synthetic: motion_gap must be positive");
}

std::vector<VideoClip> generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::vector<VideoClip> clips;
  clips.reserve(2 * spec.clips_per_class);
  for (std::size_t i = 0; i < spec.clips_per_class; ++i) {
    clips.push_back(make_clip(spec, true, i));
    clips.push_back(make_clip(spec, false, i));
  }
  return clips;
}

double mean_interframe_difference(const VideoClip& clip) {
  if (clip.frames.size() < 2) return 0.0;
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 1; t < clip.frames.size(); ++t) {
    const auto& a = clip.frames[t - 1].pixels;
    const auto& b = clip.frames[t].pixels;
    for (std::size_t i = 0; i < a.size(); ++i) total += std::abs(static_cast<double>(b[i]) - a[i]);
    count += a.size();
  }
  return total / static_cast<double>(count);
}

}  // namespace vividet
