#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fundus/error.hpp"

namespace fundus::io {

/// Little-endian primitive writer over an std::ostream.
class BinaryWriter {
public:
  explicit BinaryWriter(std::ostream& os) : os_(os) {}

  void magic(std::string_view tag) { os_.write(tag.data(), static_cast<std::streamsize>(tag.size())); }

  void u32(std::uint32_t v) {
    std::array<char, 4> b;
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    os_.write(b.data(), 4);
  }

  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    std::array<char, 8> b;
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
    os_.write(b.data(), 8);
  }

  void f64s(std::span<const double> values) {
    for (double v : values) f64(v);
  }

private:
  std::ostream& os_;
};

class BinaryReader {
public:
  BinaryReader(std::istream& is, std::string source) : is_(is), source_(std::move(source)) {}

  void expect_magic(std::string_view tag) {
    std::string got(tag.size(), '\0');
    read(got.data(), got.size());
    if (got != tag) throw format_error(source_ + ": bad magic, expected \"" + std::string(tag) + "\"");
  }

  std::uint32_t u32() {
    std::array<unsigned char, 4> b;
    read(reinterpret_cast<char*>(b.data()), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }

  double f64() {
    std::array<unsigned char, 8> b;
    read(reinterpret_cast<char*>(b.data()), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(v);
  }

  std::vector<double> f64s(std::size_t n) {
    std::vector<double> out(n);
    for (double& v : out) v = f64();
    return out;
  }

  /// Guards against absurd header dimensions before allocating.
  std::uint32_t bounded_u32(const char* what, std::uint32_t max) {
    const auto v = u32();
    if (v > max) throw format_error(source_ + ": " + what + " = " + std::to_string(v) + " is out of range");
    return v;
  }

  const std::string& source() const { return source_; }

private:
  void read(char* dst, std::size_t n) {
    is_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is_.gcount()) != n) throw format_error(source_ + ": truncated file");
  }

  std::istream& is_;
  std::string source_;
};

inline std::ofstream open_for_write(const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw io_error("cannot open " + path + " for writing");
  return os;
}

inline std::ifstream open_for_read(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("cannot open " + path);
  return is;
}

}  // namespace fundus::io
