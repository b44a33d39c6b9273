#include "vividet/vision/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vividet {

namespace {

float clamp01(double v) { return static_cast<float>(std::clamp(v, 0.0, 1.0)); }

// Sample with zero outside the frame.
double sample_zero(const Frame& f, long r, long c, std::size_t ch) {
  if (r < 0 || c < 0 || r >= static_cast<long>(f.height) || c >= static_cast<long>(f.width)) return 0.0;
  return f.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c), ch);
}

double lerp(double a, double b, double t) { return a + t * (b - a); }

}  // namespace

std::vector<std::size_t> sample_indices(std::size_t available, std::size_t target) {
  if (available == 0) throw std::invalid_argument("sample_frames: empty frame sequence");
  if (target == 0) throw std::invalid_argument("sample_frames: target frame count must be positive");
  std::vector<std::size_t> idx(target);
  for (std::size_t i = 0; i < target; ++i) {
    idx[i] = available >= target ? (i * available) / target : std::min(i, available - 1);
  }
  return idx;
}

std::vector<Frame> sample_frames(std::span<const Frame> raw, std::size_t target) {
  const auto idx = sample_indices(raw.size(), target);
  std::vector<Frame> out;
  out.reserve(target);
  for (std::size_t i : idx) out.push_back(raw[i]);
  return out;
}

LetterboxGeometry letterbox_geometry(std::size_t height, std::size_t width, std::size_t size) {
  if (size < 8) throw std::invalid_argument("resize_letterbox: target size must be at least 8");
  if (height == 0 || width == 0) throw std::invalid_argument("resize_letterbox: empty frame");
  LetterboxGeometry g;
  if (height >= width) {
    g.content_height = size;
    g.content_width = std::clamp<std::size_t>((width * size + height / 2) / height, 1, size);
  } else {
    g.content_width = size;
    g.content_height = std::clamp<std::size_t>((height * size + width / 2) / width, 1, size);
  }
  g.top = (size - g.content_height) / 2;
  g.left = (size - g.content_width) / 2;
  return g;
}

Frame resize_letterbox(const Frame& frame, std::size_t size) {
  const LetterboxGeometry g = letterbox_geometry(frame.height, frame.width, size);
  if (frame.height == size && frame.width == size) return frame;
  Frame out(size, size, frame.channels, 0.0f);
  const double sy = static_cast<double>(frame.height) / static_cast<double>(g.content_height);
  const double sx = static_cast<double>(frame.width) / static_cast<double>(g.content_width);
  const double max_y = static_cast<double>(frame.height - 1);
  const double max_x = static_cast<double>(frame.width - 1);
  for (std::size_t i = 0; i < g.content_height; ++i) {
    const double y = std::clamp((static_cast<double>(i) + 0.5) * sy - 0.5, 0.0, max_y);
    const std::size_t y0 = static_cast<std::size_t>(y);
    const std::size_t y1 = std::min(y0 + 1, frame.height - 1);
    const double wy = y - static_cast<double>(y0);
    for (std::size_t j = 0; j < g.content_width; ++j) {
      const double x = std::clamp((static_cast<double>(j) + 0.5) * sx - 0.5, 0.0, max_x);
      const std::size_t x0 = static_cast<std::size_t>(x);
      const std::size_t x1 = std::min(x0 + 1, frame.width - 1);
      const double wx = x - static_cast<double>(x0);
      for (std::size_t ch = 0; ch < frame.channels; ++ch) {
        const double top = lerp(frame.at(y0, x0, ch), frame.at(y0, x1, ch), wx);
        const double bottom = lerp(frame.at(y1, x0, ch), frame.at(y1, x1, ch), wx);
        out.at(g.top + i, g.left + j, ch) = clamp01(lerp(top, bottom, wy));
      }
    }
  }
  return out;
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_blur: sigma must be positive");
  const auto radius = static_cast<std::size_t>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double x = static_cast<double>(i) - static_cast<double>(radius);
    k[i] = std::exp(-x * x / (2.0 * sigma * sigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

Frame gaussian_blur(const Frame& frame, double sigma) {
  const auto k = gaussian_kernel(sigma);
  const long radius = static_cast<long>(k.size() / 2);
  const long h = static_cast<long>(frame.height), w = static_cast<long>(frame.width);
  const std::size_t ch_count = frame.channels;

  std::vector<double> tmp(frame.pixels.size());
  for (long r = 0; r < h; ++r) {
    for (long c = 0; c < w; ++c) {
      for (std::size_t ch = 0; ch < ch_count; ++ch) {
        double acc = 0.0;
        for (long t = -radius; t <= radius; ++t) {
          const long cc = std::clamp(c + t, 0L, w - 1);
          acc += k[static_cast<std::size_t>(t + radius)] * frame.at(r, cc, ch);
        }
        tmp[(r * w + c) * ch_count + ch] = acc;
      }
    }
  }
  Frame out(frame.height, frame.width, ch_count);
  for (long r = 0; r < h; ++r) {
    for (long c = 0; c < w; ++c) {
      for (std::size_t ch = 0; ch < ch_count; ++ch) {
        double acc = 0.0;
        for (long t = -radius; t <= radius; ++t) {
          const long rr = std::clamp(r + t, 0L, h - 1);
          acc += k[static_cast<std::size_t>(t + radius)] * tmp[(rr * w + c) * ch_count + ch];
        }
        out.at(r, c, ch) = clamp01(acc);
      }
    }
  }
  return out;
}

Frame rotate(const Frame& frame, double angle_deg) {
  if (angle_deg < -180.0 || angle_deg > 180.0) throw std::invalid_argument("rotate: angle must lie in [-180, 180]");
  if (angle_deg == 0.0) return frame;
  const double theta = angle_deg * std::numbers::pi / 180.0;
  const double cs = std::cos(theta), sn = std::sin(theta);
  const double cy = (static_cast<double>(frame.height) - 1.0) / 2.0;
  const double cx = (static_cast<double>(frame.width) - 1.0) / 2.0;
  Frame out(frame.height, frame.width, frame.channels, 0.0f);
  for (std::size_t r = 0; r < frame.height; ++r) {
    for (std::size_t c = 0; c < frame.width; ++c) {
      const double dy = static_cast<double>(r) - cy;
      const double dx = static_cast<double>(c) - cx;
      const double sx = cx + dx * cs - dy * sn;
      const double sy = cy + dx * sn + dy * cs;
      const double fy = std::floor(sy), fx = std::floor(sx);
      const long y0 = static_cast<long>(fy), x0 = static_cast<long>(fx);
      const double wy = sy - fy, wx = sx - fx;
      for (std::size_t ch = 0; ch < frame.channels; ++ch) {
        const double top = lerp(sample_zero(frame, y0, x0, ch), sample_zero(frame, y0, x0 + 1, ch), wx);
        const double bottom = lerp(sample_zero(frame, y0 + 1, x0, ch), sample_zero(frame, y0 + 1, x0 + 1, ch), wx);
        out.at(r, c, ch) = clamp01(lerp(top, bottom, wy));
      }
    }
  }
  return out;
}

Frame flip(const Frame& frame, FlipAxis axis) {
  Frame out(frame.height, frame.width, frame.channels);
  for (std::size_t r = 0; r < frame.height; ++r) {
    for (std::size_t c = 0; c < frame.width; ++c) {
      const std::size_t sr = axis == FlipAxis::Vertical ? frame.height - 1 - r : r;
      const std::size_t sc = axis == FlipAxis::Horizontal ? frame.width - 1 - c : c;
      for (std::size_t ch = 0; ch < frame.channels; ++ch) out.at(r, c, ch) = frame.at(sr, sc, ch);
    }
  }
  return out;
}

Frame perturb_uniform(const Frame& frame, double amplitude, Rng& rng) {
  if (amplitude < 0.0) throw std::invalid_argument("perturb_uniform: amplitude must be non-negative");
  if (amplitude == 0.0) return frame;
  Frame out = frame;
  for (float& v : out.pixels) v = clamp01(static_cast<double>(v) + rng.uniform(-amplitude, amplitude));
  return out;
}

VideoClip preprocess_clip(const VideoClip& clip, std::size_t target_frames, std::size_t size) {
  VideoClip out;
  out.label = clip.label;
  out.source_id = clip.source_id;
  out.frames = sample_frames(clip.frames, target_frames);
  for (Frame& f : out.frames) f = resize_letterbox(f, size);
  return out;
}

}  // namespace vividet
