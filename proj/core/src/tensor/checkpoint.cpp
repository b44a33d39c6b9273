#include "vividet/tensor/checkpoint.hpp"

#include <fstream>

#include "vividet/tensor/binary_io.hpp"

namespace vividet {

namespace {

constexpr std::uint32_t kMaxNameLength = 4096;
constexpr std::uint32_t kMaxRank = 8;
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 32;

}  // namespace

const Tensor<float>* Checkpoint::find(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return &t.value;
  }
  return nullptr;
}

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  out.write("VVDT", 4);
  binary::put_uint<std::uint32_t>(out, kCheckpointVersion);
  binary::put_uint<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& [name, value] : ckpt.tensors) {
    binary::put_uint<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    binary::put_uint<std::uint32_t>(out, static_cast<std::uint32_t>(value.rank()));
    for (std::size_t d : value.shape()) binary::put_uint<std::uint64_t>(out, d);
    for (float v : value.data()) binary::put_f32(out, v);
  }
  if (!ckpt.manifest.empty()) {
    out.write("MNFT", 4);
    binary::put_uint<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.manifest.size()));
    out.write(ckpt.manifest.data(), static_cast<std::streamsize>(ckpt.manifest.size()));
  }
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_checkpoint(out, ckpt);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Checkpoint read_checkpoint(std::istream& in) {
  binary::expect_magic(in, "VVDT", "VVDT checkpoint");
  const auto version = binary::get_uint<std::uint32_t>(in, "checkpoint version");
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto count = binary::get_uint<std::uint32_t>(in, "tensor count");
  Checkpoint ckpt;
  for (std::uint32_t t = 0; t < count; ++t) {
    const auto name_len = binary::get_uint<std::uint32_t>(in, "tensor name length");
    if (name_len > kMaxNameLength) throw FormatError("tensor name length " + std::to_string(name_len) + " too large");
    std::string name(name_len, '\0');
    binary::read_exact(in, name.data(), name_len, "tensor name");
    const auto rank = binary::get_uint<std::uint32_t>(in, "tensor rank");
    if (rank > kMaxRank) throw FormatError("tensor '" + name + "' has implausible rank " + std::to_string(rank));
    Shape shape;
    std::uint64_t numel = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
      const auto d = binary::get_uint<std::uint64_t>(in, "tensor dimension");
      if (d == 0 || d > kMaxElements || numel > kMaxElements / d) {
        throw FormatError("tensor '" + name + "' has overflowing or zero dimension");
      }
      numel *= d;
      shape.push_back(static_cast<std::size_t>(d));
    }
    std::vector<float> data(static_cast<std::size_t>(numel));
    for (auto& v : data) v = binary::get_f32(in, "tensor payload");
    ckpt.tensors.push_back({std::move(name), Tensor<float>(std::move(shape), std::move(data))});
  }
  char tag[4];
  in.read(tag, 4);
  if (in.gcount() == 0) return ckpt;
  if (in.gcount() != 4 || std::string(tag, 4) != "MNFT") throw FormatError("unexpected trailing bytes in checkpoint");
  const auto len = binary::get_uint<std::uint32_t>(in, "manifest length");
  ckpt.manifest.assign(len, '\0');
  binary::read_exact(in, ckpt.manifest.data(), len, "manifest");
  return ckpt;
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

}  // namespace vividet
