#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "vividet/vision/clip.hpp"

namespace vividet {

/// Native clip container (".vclip"):
///   magic "VCLP" | version u32 | label u8 (0 non-violent, 1 violent, 255 unlabeled)
///   | T, H, W, C as u32 | T*H*W*C f32, row-major (t, h, w, c)
/// All fields little-endian.
inline constexpr std::uint32_t kClipVersion = 1;

void write_clip(std::ostream& out, const VideoClip& clip);
void write_clip(const VideoClip& clip, const std::filesystem::path& path);

/// Throws FormatError on bad magic, unknown version or label, zero or overflowing dimensions,
/// or a truncated payload. source_id is set to the file stem by the path overload.
VideoClip read_clip(std::istream& in);
VideoClip read_clip(const std::filesystem::path& path);

/// Binary netpbm image (P5 grayscale / P6 RGB, maxval up to 65535).
Frame read_pnm(const std::filesystem::path& path);
/// Writes P5 for 1 channel, P6 for 3 channels, quantized to 8 bits.
void write_pnm(const Frame& frame, const std::filesystem::path& path);

/// All .pgm/.ppm/.pnm files in `dir`, in lexicographic file-name order.
VideoClip read_frame_directory(const std::filesystem::path& dir);

struct DatasetEntry {
  std::filesystem::path path;  // relative to the dataset root
  Label label = Label::Unlabeled;
};

/// Writes root/{violent,nonviolent}/<source_id>.vclip plus root/manifest.txt
/// ("<relative path> <label>" per line). Returns the entries in manifest order.
std::vector<DatasetEntry> write_dataset(const std::vector<VideoClip>& clips, const std::filesystem::path& root);

/// Lists root/{violent,nonviolent}/ entries: *.vclip files and frame directories.
std::vector<DatasetEntry> list_dataset(const std::filesystem::path& root);

/// Reads every listed clip, labels it from its directory, and resamples / letterboxes it to
/// frames x size x size when its geometry differs.
std::vector<VideoClip> load_dataset(const std::filesystem::path& root, std::size_t frames, std::size_t size);

/// Reads a .vclip file or a frame directory.
VideoClip load_clip_any(const std::filesystem::path& path);

}  // namespace vividet
