#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace vividet {

/// On-disk label codes of the .vclip format.
enum class Label : std::uint8_t { NonViolent = 0, Violent = 1, Unlabeled = 255 };

// Classifier output order: index 0 is Violent, index 1 is NonViolent.
inline constexpr std::size_t kViolentClass = 0;
inline constexpr std::size_t kNonViolentClass = 1;
inline constexpr std::size_t kNumClasses = 2;

std::string_view label_name(Label label) noexcept;
/// Throws std::invalid_argument for Unlabeled.
std::size_t class_index(Label label);
Label label_from_class(std::size_t index);

/// One H x W x C image, row-major with interleaved channels, intensities in [0, 1].
struct Frame {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<float> pixels;

  Frame() = default;
  Frame(std::size_t h, std::size_t w, std::size_t c, float fill = 0.0f)
      : height(h), width(w), channels(c), pixels(h * w * c, fill) {}

  float& at(std::size_t r, std::size_t col, std::size_t ch) { return pixels[(r * width + col) * channels + ch]; }
  float at(std::size_t r, std::size_t col, std::size_t ch) const { return pixels[(r * width + col) * channels + ch]; }

  bool same_geometry(const Frame& o) const noexcept {
    return height == o.height && width == o.width && channels == o.channels;
  }
  friend bool operator==(const Frame&, const Frame&) = default;
};

/// T x H x W x C stack of frames plus label metadata.
struct VideoClip {
  std::vector<Frame> frames;
  Label label = Label::Unlabeled;
  std::string source_id;

  std::size_t frame_count() const noexcept { return frames.size(); }
  std::size_t height() const noexcept { return frames.empty() ? 0 : frames[0].height; }
  std::size_t width() const noexcept { return frames.empty() ? 0 : frames[0].width; }
  std::size_t channels() const noexcept { return frames.empty() ? 0 : frames[0].channels; }

  /// Voxel (t, r, c, ch).
  float at(std::size_t t, std::size_t r, std::size_t c, std::size_t ch) const { return frames[t].at(r, c, ch); }

  /// Throws std::invalid_argument if frames are empty, differ in geometry or leave [0, 1].
  void validate() const;

  friend bool operator==(const VideoClip&, const VideoClip&) = default;
};

std::string clip_shape_str(const VideoClip& clip);

}  // namespace vividet
