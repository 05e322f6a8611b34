#pragma once

#include <bit>
#include <concepts>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "cppless/error.hpp"

namespace cppless::wire {

// The wire is little-endian; on big-endian hosts every fixed-width value is
// byte-swapped on the way in and out.
template <std::unsigned_integral U>
constexpr U to_little_endian(U v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    if constexpr (sizeof(U) == 1) return v;
    if constexpr (sizeof(U) == 2) return __builtin_bswap16(v);
    if constexpr (sizeof(U) == 4) return __builtin_bswap32(v);
    if constexpr (sizeof(U) == 8) return __builtin_bswap64(v);
  }
}

template <std::unsigned_integral U>
constexpr U from_little_endian(U v) {
  return to_little_endian(v);  // swap is its own inverse
}

// Append-only byte sink.
class Writer {
 public:
  explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { put(v); }
  void u32(std::uint32_t v) { put(v); }
  void u64(std::uint64_t v) { put(v); }
  void i8(std::int8_t v) { u8(static_cast<std::uint8_t>(v)); }
  void i16(std::int16_t v) { put(static_cast<std::uint16_t>(v)); }
  void i32(std::int32_t v) { put(static_cast<std::uint32_t>(v)); }
  void i64(std::int64_t v) { put(static_cast<std::uint64_t>(v)); }
  void f32(float v) { put(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
  void boolean(bool v) { u8(v ? 1 : 0); }

  void raw(const void* data, std::size_t n) {
    if (n == 0) return;
    const auto* p = static_cast<const std::uint8_t*>(data);
    out_.insert(out_.end(), p, p + n);
  }

  std::vector<std::uint8_t>& buffer() { return out_; }

 private:
  template <std::unsigned_integral U>
  void put(U v) {
    U le = to_little_endian(v);
    std::uint8_t tmp[sizeof(U)];
    std::memcpy(tmp, &le, sizeof(U));
    out_.insert(out_.end(), tmp, tmp + sizeof(U));
  }

  std::vector<std::uint8_t>& out_;
};

// Bounds-checked cursor over immutable bytes. All failures throw DecodeError
// carrying the offset at which the violation was detected.
class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }
  bool at_end() const { return pos_ == data_.size(); }

  std::uint8_t u8() {
    need(1, "u8");
    return data_[pos_++];
  }
  std::uint16_t u16() { return get<std::uint16_t>("u16"); }
  std::uint32_t u32() { return get<std::uint32_t>("u32"); }
  std::uint64_t u64() { return get<std::uint64_t>("u64"); }
  std::int8_t i8() { return static_cast<std::int8_t>(u8()); }
  std::int16_t i16() { return static_cast<std::int16_t>(get<std::uint16_t>("i16")); }
  std::int32_t i32() { return static_cast<std::int32_t>(get<std::uint32_t>("i32")); }
  std::int64_t i64() { return static_cast<std::int64_t>(get<std::uint64_t>("i64")); }
  float f32() { return std::bit_cast<float>(get<std::uint32_t>("f32")); }
  double f64() { return std::bit_cast<double>(get<std::uint64_t>("f64")); }

  // Reads a u64 length prefix and validates it against the bytes actually
  // left, so a corrupt prefix fails here instead of in a huge allocation.
  std::size_t length_prefix(const char* what) {
    std::size_t at = pos_;
    std::uint64_t n = u64();
    if (n > remaining()) {
      throw DecodeError("length prefix " + std::to_string(n) + " for " + what +
                            " exceeds remaining " + std::to_string(remaining()) + " bytes",
                        at);
    }
    return static_cast<std::size_t>(n);
  }

  std::span<const std::uint8_t> raw(std::size_t n, const char* what) {
    need(n, what);
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw DecodeError("unexpected end of input reading " + std::string(what) + " (need " +
                            std::to_string(n) + " bytes, have " + std::to_string(remaining()) + ")",
                        pos_);
    }
  }

 private:
  template <std::unsigned_integral U>
  U get(const char* what) {
    need(sizeof(U), what);
    U v;
    std::memcpy(&v, data_.data() + pos_, sizeof(U));
    pos_ += sizeof(U);
    return from_little_endian(v);
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

// Strict UTF-8 validity scan (RFC 3629: no overlongs, no surrogates, max U+10FFFF).
bool is_valid_utf8(std::string_view s);

}  // namespace cppless::wire
