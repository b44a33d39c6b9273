#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vividet/model/model_check.hpp"
#include "vividet/tensor/rng.hpp"
#include "vividet/vision/clip_io.hpp"
#include "vividet/vision/transforms.hpp"

using namespace vividet;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("vividet_clip_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string to_bytes(const VideoClip& clip) {
  std::ostringstream out;
  write_clip(out, clip);
  return out.str();
}

}  // namespace

TEST(ClipIo, RoundTripIsBitwise) {
  Rng rng(3);
  for (const Label label : {Label::Violent, Label::NonViolent, Label::Unlabeled}) {
    VideoClip clip = random_clip({5, 7, 9, 3}, label, rng);
    clip.source_id.clear();  // not part of the stream format
    std::istringstream in(to_bytes(clip));
    EXPECT_EQ(read_clip(in), clip);
  }
}

TEST(ClipIo, HeaderAndSize) {
  Rng rng(4);
  const VideoClip clip = random_clip({2, 3, 4, 1}, Label::Violent, rng);
  const std::string bytes = to_bytes(clip);
  EXPECT_EQ(bytes.substr(0, 4), "VCLP");
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 1u);
  EXPECT_EQ(bytes.size(), 4u + 4u + 1u + 16u + 2u * 3u * 4u * 4u);
}

TEST(ClipIo, RejectsCorruptStreams) {
  Rng rng(5);
  const std::string bytes = to_bytes(random_clip({2, 4, 4, 1}, Label::NonViolent, rng));
  auto fails = [](const std::string& b) {
    std::istringstream in(b);
    EXPECT_THROW(read_clip(in), FormatError);
  };
  std::string bad = bytes;
  bad[1] = 'Z';
  fails(bad);
  bad = bytes;
  bad[8] = 7;  // label code
  fails(bad);
  bad = bytes;
  bad[9] = 0;  // T = 0
  fails(bad);
  bad = bytes;
  for (int i = 9; i < 25; ++i) bad[i] = static_cast<char>(0xff);  // overflowing dimensions
  fails(bad);
  fails(bytes.substr(0, bytes.size() - 1));
  fails(bytes.substr(0, 12));
}

TEST(ClipIo, FileOverloadSetsSourceId) {
  const fs::path dir = fresh_dir("file");
  Rng rng(6);
  VideoClip clip = random_clip({3, 4, 4, 3}, Label::Violent, rng);
  write_clip(clip, dir / "abc.vclip");
  const VideoClip back = read_clip(dir / "abc.vclip");
  EXPECT_EQ(back.source_id, "abc");
  EXPECT_EQ(back.frames, clip.frames);
  EXPECT_THROW(read_clip(dir / "missing.vclip"), FormatError);
}

TEST(Pnm, RoundTripOfEightBitValues) {
  const fs::path dir = fresh_dir("pnm");
  for (const std::size_t channels : {std::size_t{1}, std::size_t{3}}) {
    Frame f(5, 6, channels);
    for (std::size_t i = 0; i < f.pixels.size(); ++i) f.pixels[i] = static_cast<float>((i * 37) % 256) / 255.0f;
    const fs::path p = dir / (channels == 1 ? "a.pgm" : "a.ppm");
    write_pnm(f, p);
    const Frame back = read_pnm(p);
    ASSERT_TRUE(back.same_geometry(f));
    for (std::size_t i = 0; i < f.pixels.size(); ++i) EXPECT_NEAR(back.pixels[i], f.pixels[i], 1e-6);
  }
  EXPECT_THROW(write_pnm(Frame(2, 2, 2), dir / "x.pnm"), std::invalid_argument);
}

TEST(Pnm, ReadsSixteenBitAndComments) {
  const fs::path dir = fresh_dir("pnm16");
  {
    std::ofstream out(dir / "w.pgm", std::ios::binary);
    out << "P5\n# comment\n2 1\n65535\n";
    const unsigned char px[] = {0xff, 0xff, 0x00, 0x00};
    out.write(reinterpret_cast<const char*>(px), 4);
  }
  const Frame f = read_pnm(dir / "w.pgm");
  EXPECT_EQ(f.width, 2u);
  EXPECT_FLOAT_EQ(f.pixels[0], 1.0f);
  EXPECT_FLOAT_EQ(f.pixels[1], 0.0f);
  {
    std::ofstream out(dir / "bad.pgm", std::ios::binary);
    out << "P2\n1 1\n255\n0\n";
  }
  EXPECT_THROW(read_pnm(dir / "bad.pgm"), FormatError);
}

TEST(FrameDirectory, ThirtyFramesPadToFiftySix) {
  const fs::path dir = fresh_dir("frames") / "clip01";
  fs::create_directories(dir);
  for (int i = 0; i < 30; ++i) {
    Frame f(10, 20, 1, static_cast<float>(i) / 255.0f);
    char name[32];
    std::snprintf(name, sizeof name, "f%03d.pgm", i);
    write_pnm(f, dir / name);
  }
  const VideoClip raw = read_frame_directory(dir);
  ASSERT_EQ(raw.frame_count(), 30u);
  EXPECT_EQ(raw.source_id, "clip01");

  const VideoClip clip = preprocess_clip(raw, 56, 64);
  ASSERT_EQ(clip.frame_count(), 56u);
  const auto idx = sample_indices(30, 56);
  // Oracle: frames in order, then the last frame repeated.
  for (std::size_t i = 0; i < 56; ++i) {
    EXPECT_EQ(idx[i], std::min<std::size_t>(i, 29));
    // Letterbox content sits in the middle rows; the center pixel carries the frame's value.
    EXPECT_NEAR(clip.frames[i].at(32, 32, 0), static_cast<float>(std::min<std::size_t>(i, 29)) / 255.0f, 1e-6);
  }
  EXPECT_EQ(clip.frames[55], clip.frames[29]);
}

TEST(FrameDirectory, EmptyOrMixedSizesFail) {
  const fs::path dir = fresh_dir("frames_bad");
  EXPECT_THROW(read_frame_directory(dir), FormatError);
  write_pnm(Frame(4, 4, 1), dir / "a.pgm");
  write_pnm(Frame(4, 5, 1), dir / "b.pgm");
  EXPECT_THROW(read_frame_directory(dir), FormatError);
}

TEST(Dataset, WriteListLoad) {
  const fs::path root = fresh_dir("dataset");
  Rng rng(11);
  std::vector<VideoClip> clips;
  for (int i = 0; i < 4; ++i) {
    clips.push_back(random_clip({4, 8, 8, 1}, i % 2 ? Label::NonViolent : Label::Violent, rng));
    clips.back().source_id = "clip" + std::to_string(i);
  }
  const auto entries = write_dataset(clips, root);
  ASSERT_EQ(entries.size(), 4u);

  std::ifstream manifest(root / "manifest.txt");
  std::string line;
  std::size_t lines = 0;
  while (std::getline(manifest, line)) {
    const auto& e = entries[lines++];
    EXPECT_EQ(line, e.path.generic_string() + " " + std::string(label_name(e.label)));
  }
  EXPECT_EQ(lines, 4u);

  const auto listed = list_dataset(root);
  ASSERT_EQ(listed.size(), 4u);
  EXPECT_EQ(listed[0].label, Label::Violent);
  EXPECT_EQ(listed[3].label, Label::NonViolent);

  const auto loaded = load_dataset(root, 4, 8);
  ASSERT_EQ(loaded.size(), 4u);
  EXPECT_EQ(loaded[0].frames, clips[0].frames);
  EXPECT_EQ(loaded[2].frames, clips[1].frames);

  const auto resized = load_dataset(root, 6, 16);
  EXPECT_EQ(resized[0].frame_count(), 6u);
  EXPECT_EQ(resized[0].height(), 16u);
}

TEST(Dataset, MislabeledFileIsRejected) {
  const fs::path root = fresh_dir("mislabeled");
  Rng rng(12);
  fs::create_directories(root / "violent");
  write_clip(random_clip({2, 8, 8, 1}, Label::NonViolent, rng), root / "violent" / "x.vclip");
  EXPECT_THROW(load_dataset(root, 2, 8), FormatError);
  EXPECT_THROW(list_dataset(root / "nope"), FormatError);
}

TEST(Dataset, UnlabeledClipCannotBeWritten) {
  Rng rng(13);
  std::vector<VideoClip> clips{random_clip({2, 8, 8, 1}, Label::Unlabeled, rng)};
  EXPECT_THROW(write_dataset(clips, fresh_dir("unlabeled")), std::invalid_argument);
}
