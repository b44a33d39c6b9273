#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "vividet/tensor/tensor.hpp"

namespace vividet {

/// Binary parameter file ("VVDT").
///
///   magic "VVDT" | version u32 | count u32
///   count x { name_len u32 | name utf-8 | rank u32 | dims u64[rank] | f32[numel] }
///   optional trailer: "MNFT" | len u32 | utf-8 manifest text
///
/// All integers and floats are little-endian.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  Tensor<float> value;
};

struct Checkpoint {
  std::vector<NamedTensor> tensors;
  std::string manifest;

  const Tensor<float>* find(const std::string& name) const;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);

/// Throws FormatError on bad magic, unknown version, truncation or implausible dimensions.
Checkpoint read_checkpoint(std::istream& in);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace vividet
