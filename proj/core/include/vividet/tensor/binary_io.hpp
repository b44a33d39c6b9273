#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "vividet/tensor/tensor.hpp"

// Little-endian primitive encoding shared by the binary file formats.
namespace vividet::binary {

template <typename U>
void put_uint(std::ostream& out, U value) {
  char buf[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  out.write(buf, sizeof(U));
}

inline void put_f32(std::ostream& out, float value) { put_uint(out, std::bit_cast<std::uint32_t>(value)); }

inline void read_exact(std::istream& in, char* dst, std::size_t n, const char* what) {
  in.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw FormatError(std::string("truncated input while reading ") + what);
  }
}

template <typename U>
U get_uint(std::istream& in, const char* what) {
  unsigned char buf[sizeof(U)];
  read_exact(in, reinterpret_cast<char*>(buf), sizeof(U), what);
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(buf[i]) << (8 * i);
  return v;
}

inline float get_f32(std::istream& in, const char* what) {
  return std::bit_cast<float>(get_uint<std::uint32_t>(in, what));
}

inline void expect_magic(std::istream& in, const char (&magic)[5], const char* format) {
  char buf[4];
  in.read(buf, 4);
  if (in.gcount() != 4 || std::memcmp(buf, magic, 4) != 0) {
    throw FormatError(std::string("bad magic: not a ") + format + " file");
  }
}

}  // namespace vividet::binary
