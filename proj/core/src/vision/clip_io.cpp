#include "vividet/vision/clip_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>

#include "vividet/tensor/binary_io.hpp"
#include "vividet/vision/transforms.hpp"

namespace vividet {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kMaxClipElements = std::uint64_t{1} << 31;

Label decode_label(std::uint8_t code) {
  switch (code) {
    case 0:
      return Label::NonViolent;
    case 1:
      return Label::Violent;
    case 255:
      return Label::Unlabeled;
    default:
      throw FormatError("invalid label code " + std::to_string(code) + " in clip file");
  }
}

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string pnm_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  if (tok.empty()) throw FormatError("truncated PNM header");
  return tok;
}

std::size_t pnm_number(std::istream& in) {
  const std::string tok = pnm_token(in);
  if (!std::all_of(tok.begin(), tok.end(), [](unsigned char c) { return std::isdigit(c); }) || tok.size() > 9) {
    throw FormatError("malformed PNM header field '" + tok + "'");
  }
  return static_cast<std::size_t>(std::stoul(tok));
}

std::optional<Label> label_from_dir(const std::string& name) {
  if (name == "violent") return Label::Violent;
  if (name == "nonviolent") return Label::NonViolent;
  return std::nullopt;
}

}  // namespace

void write_clip(std::ostream& out, const VideoClip& clip) {
  clip.validate();
  out.write("VCLP", 4);
  binary::put_uint<std::uint32_t>(out, kClipVersion);
  binary::put_uint<std::uint8_t>(out, static_cast<std::uint8_t>(clip.label));
  binary::put_uint<std::uint32_t>(out, static_cast<std::uint32_t>(clip.frame_count()));
  binary::put_uint<std::uint32_t>(out, static_cast<std::uint32_t>(clip.height()));
  binary::put_uint<std::uint32_t>(out, static_cast<std::uint32_t>(clip.width()));
  binary::put_uint<std::uint32_t>(out, static_cast<std::uint32_t>(clip.channels()));
  for (const Frame& f : clip.frames)
    for (float v : f.pixels) binary::put_f32(out, v);
}

void write_clip(const VideoClip& clip, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_clip(out, clip);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

VideoClip read_clip(std::istream& in) {
  binary::expect_magic(in, "VCLP", "VCLP clip");
  const auto version = binary::get_uint<std::uint32_t>(in, "clip version");
  if (version != kClipVersion) throw FormatError("unsupported clip version " + std::to_string(version));
  VideoClip clip;
  clip.label = decode_label(binary::get_uint<std::uint8_t>(in, "clip label"));
  std::uint64_t dims[4];
  std::uint64_t total = 1;
  for (auto& d : dims) {
    d = binary::get_uint<std::uint32_t>(in, "clip dimensions");
    if (d == 0) throw FormatError("clip has a zero dimension");
    total *= d;
    if (total > kMaxClipElements) throw FormatError("clip dimensions overflow the element limit");
  }
  clip.frames.reserve(dims[0]);
  for (std::uint64_t t = 0; t < dims[0]; ++t) {
    Frame f(dims[1], dims[2], dims[3]);
    for (float& v : f.pixels) v = binary::get_f32(in, "clip payload");
    clip.frames.push_back(std::move(f));
  }
  return clip;
}

VideoClip read_clip(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open clip " + path.string());
  VideoClip clip = read_clip(in);
  clip.source_id = path.stem().string();
  return clip;
}

Frame read_pnm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open image " + path.string());
  const std::string magic = pnm_token(in);
  std::size_t channels;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    throw FormatError(path.string() + ": unsupported image type '" + magic + "' (expected P5 or P6)");
  }
  const std::size_t width = pnm_number(in);
  const std::size_t height = pnm_number(in);
  const std::size_t maxval = pnm_number(in);
  if (width == 0 || height == 0 || maxval == 0 || maxval > 65535) {
    throw FormatError(path.string() + ": invalid image header");
  }
  const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
  Frame f(height, width, channels);
  std::vector<unsigned char> raw(f.pixels.size() * bytes_per_sample);
  binary::read_exact(in, reinterpret_cast<char*>(raw.data()), raw.size(), "image payload");
  const double inv = 1.0 / static_cast<double>(maxval);
  for (std::size_t i = 0; i < f.pixels.size(); ++i) {
    const std::size_t v = bytes_per_sample == 2 ? (std::size_t{raw[2 * i]} << 8) | raw[2 * i + 1] : raw[i];
    f.pixels[i] = static_cast<float>(std::min(1.0, static_cast<double>(v) * inv));
  }
  return f;
}

void write_pnm(const Frame& frame, const fs::path& path) {
  if (frame.channels != 1 && frame.channels != 3) {
    throw std::invalid_argument("write_pnm: only 1- or 3-channel frames can be written");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << (frame.channels == 1 ? "P5" : "P6") << "\n" << frame.width << " " << frame.height << "\n255\n";
  std::vector<char> bytes(frame.pixels.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const double v = std::clamp(static_cast<double>(frame.pixels[i]), 0.0, 1.0);
    bytes[i] = static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0)));
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

VideoClip read_frame_directory(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && is_image_file(e.path())) files.push_back(e.path());
  }
  if (files.empty()) throw FormatError("frame directory " + dir.string() + " contains no images");
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  VideoClip clip;
  clip.source_id = dir.filename().string();
  for (const auto& f : files) {
    clip.frames.push_back(read_pnm(f));
    if (!clip.frames.back().same_geometry(clip.frames.front())) {
      throw FormatError("frame " + f.string() + " differs in size from the first frame");
    }
  }
  return clip;
}

VideoClip load_clip_any(const fs::path& path) {
  if (fs::is_directory(path)) return read_frame_directory(path);
  return read_clip(path);
}

std::vector<DatasetEntry> write_dataset(const std::vector<VideoClip>& clips, const fs::path& root) {
  fs::create_directories(root / "violent");
  fs::create_directories(root / "nonviolent");
  std::vector<DatasetEntry> entries;
  for (const VideoClip& clip : clips) {
    if (clip.label == Label::Unlabeled) throw std::invalid_argument("write_dataset: clip '" + clip.source_id + "' is unlabeled");
    DatasetEntry e;
    e.label = clip.label;
    e.path = fs::path(std::string(label_name(clip.label))) / (clip.source_id + ".vclip");
    write_clip(clip, root / e.path);
    entries.push_back(std::move(e));
  }
  std::ofstream manifest(root / "manifest.txt", std::ios::trunc);
  if (!manifest) throw std::runtime_error("cannot write manifest in " + root.string());
  for (const auto& e : entries) manifest << e.path.generic_string() << " " << label_name(e.label) << "\n";
  return entries;
}

std::vector<DatasetEntry> list_dataset(const fs::path& root) {
  if (!fs::is_directory(root)) throw FormatError("dataset root " + root.string() + " is not a directory");
  std::vector<DatasetEntry> entries;
  for (const char* sub : {"violent", "nonviolent"}) {
    const fs::path dir = root / sub;
    if (!fs::is_directory(dir)) continue;
    const Label label = *label_from_dir(sub);
    std::vector<fs::path> items;
    for (const auto& e : fs::directory_iterator(dir)) {
      if ((e.is_regular_file() && e.path().extension() == ".vclip") || e.is_directory()) items.push_back(e.path());
    }
    std::sort(items.begin(), items.end());
    for (const auto& p : items) entries.push_back({fs::relative(p, root), label});
  }
  return entries;
}

std::vector<VideoClip> load_dataset(const fs::path& root, std::size_t frames, std::size_t size) {
  std::vector<VideoClip> clips;
  for (const auto& entry : list_dataset(root)) {
    VideoClip clip = load_clip_any(root / entry.path);
    if (clip.label != Label::Unlabeled && clip.label != entry.label) {
      throw FormatError("clip " + entry.path.string() + " is stored as " + std::string(label_name(clip.label)) +
                        " but lives under " + std::string(label_name(entry.label)));
    }
    clip.label = entry.label;
    if (clip.frame_count() != frames || clip.height() != size || clip.width() != size) {
      clip = preprocess_clip(clip, frames, size);
    }
    clips.push_back(std::move(clip));
  }
  return clips;
}

}  // namespace vividet
