#include "vividet/vision/clip.hpp"

#include <stdexcept>

namespace vividet {

std::string_view label_name(Label label) noexcept {
  switch (label) {
    case Label::Violent:
      return "violent";
    case Label::NonViolent:
      return "nonviolent";
    case Label::Unlabeled:
      break;
  }
  return "unlabeled";
}

std::size_t class_index(Label label) {
  switch (label) {
    case Label::Violent:
      return kViolentClass;
    case Label::NonViolent:
      return kNonViolentClass;
    case Label::Unlabeled:
      break;
  }
  throw std::invalid_argument("class_index: clip is unlabeled");
}

Label label_from_class(std::size_t index) {
  if (index == kViolentClass) return Label::Violent;
  if (index == kNonViolentClass) return Label::NonViolent;
  throw std::out_of_range("label_from_class: class index " + std::to_string(index));
}

void VideoClip::validate() const {
  if (frames.empty()) throw std::invalid_argument("clip '" + source_id + "' has no frames");
  const Frame& first = frames.front();
  if (first.height == 0 || first.width == 0 || first.channels == 0) {
    throw std::invalid_argument("clip '" + source_id + "' has an empty frame");
  }
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const Frame& f = frames[t];
    if (!f.same_geometry(first) || f.pixels.size() != f.height * f.width * f.channels) {
      throw std::invalid_argument("clip '" + source_id + "' frame " + std::to_string(t) + " has inconsistent geometry");
    }
    for (float v : f.pixels) {
      if (!(v >= 0.0f && v <= 1.0f)) {
        throw std::invalid_argument("clip '" + source_id + "' frame " + std::to_string(t) + " has pixel outside [0,1]");
      }
    }
  }
}

std::string clip_shape_str(const VideoClip& clip) {
  return std::to_string(clip.frame_count()) + "x" + std::to_string(clip.height()) + "x" +
         std::to_string(clip.width()) + "x" + std::to_string(clip.channels());
}

}  // namespace vividet
