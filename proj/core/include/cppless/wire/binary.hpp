#pragma once

#include <array>
#include <bit>
#include <concepts>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "cppless/error.hpp"
#include "cppless/wire/bytes.hpp"
#include "cppless/wire/schema.hpp"

namespace cppless::wire {

// ---------------------------------------------------------------------------
// Generic (schema-driven) binary codec over the dynamic Value tree.

// Appends the encoding of `v` under `schema`; `path` names the position for
// error messages and starts as "$".
void encode_value_into(const Value& v, const Schema& schema, Writer& w, const std::string& path);

// Reads one value of `schema` from the cursor.
Value decode_value_from(Reader& r, const Schema& schema);

std::vector<std::uint8_t> encode_value(const Value& v, const Schema& schema);

// Decodes and requires the input to be consumed exactly.
Value decode_value(std::span<const std::uint8_t> bytes, const Schema& schema);

// ---------------------------------------------------------------------------
// Typed codec: WireCodec<T> gives each serializable C++ type its schema, its
// binary encoding, and its conversion to/from the dynamic Value (used by the
// JSON mode). The primary template is intentionally undefined — a type without
// a specialization is not serializable, and task definitions reject it at
// compile time.

template <typename T>
struct WireCodec;

namespace detail {

template <typename T, Kind K>
struct ScalarCodec {
  static Schema schema();
  static void encode(const T& v, Writer& w);
  static T decode(Reader& r);
  static Value to_value(const T& v) { return Value(v); }
  static T from_value(const Value& v) {
    if (!v.holds<T>()) throw EncodeError("value does not hold expected scalar type");
    return v.get<T>();
  }
};

}  // namespace detail

template <>
struct WireCodec<bool> {
  static Schema schema() { return Schema::boolean(); }
  static void encode(const bool& v, Writer& w) { w.boolean(v); }
  static bool decode(Reader& r) {
    std::size_t at = r.offset();
    std::uint8_t b = r.u8();
    if (b > 1) throw DecodeError("invalid bool byte " + std::to_string(b), at);
    return b == 1;
  }
  static Value to_value(const bool& v) { return Value(v); }
  static bool from_value(const Value& v) { return v.get<bool>(); }
};

#define CPPLESS_SCALAR_CODEC(TYPE, KIND, WRITE, READ)                  \
  template <>                                                          \
  struct WireCodec<TYPE> {                                             \
    static Schema schema() { return Schema::KIND(); }                  \
    static void encode(const TYPE& v, Writer& w) { w.WRITE(v); }       \
    static TYPE decode(Reader& r) { return r.READ(); }                 \
    static Value to_value(const TYPE& v) { return Value(v); }          \
    static TYPE from_value(const Value& v) { return v.get<TYPE>(); }   \
  }

CPPLESS_SCALAR_CODEC(std::int8_t, i8, i8, i8);
CPPLESS_SCALAR_CODEC(std::int16_t, i16, i16, i16);
CPPLESS_SCALAR_CODEC(std::int32_t, i32, i32, i32);
CPPLESS_SCALAR_CODEC(std::int64_t, i64, i64, i64);
CPPLESS_SCALAR_CODEC(std::uint8_t, u8, u8, u8);
CPPLESS_SCALAR_CODEC(std::uint16_t, u16, u16, u16);
CPPLESS_SCALAR_CODEC(std::uint32_t, u32, u32, u32);
CPPLESS_SCALAR_CODEC(std::uint64_t, u64, u64, u64);
CPPLESS_SCALAR_CODEC(float, f32, f32, f32);
CPPLESS_SCALAR_CODEC(double, f64, f64, f64);

#undef CPPLESS_SCALAR_CODEC

template <>
struct WireCodec<std::string> {
  static Schema schema() { return Schema::string(); }
  static void encode(const std::string& v, Writer& w) {
    if (!is_valid_utf8(v)) throw EncodeError("invalid UTF-8 in string value");
    w.u64(v.size());
    w.raw(v.data(), v.size());
  }
  static std::string decode(Reader& r) {
    std::size_t at = r.offset();
    std::size_t n = r.length_prefix("string");
    auto s = r.raw(n, "string body");
    std::string out(reinterpret_cast<const char*>(s.data()), s.size());
    if (!is_valid_utf8(out)) throw DecodeError("invalid UTF-8 in string", at);
    return out;
  }
  static Value to_value(const std::string& v) { return Value(v); }
  static std::string from_value(const Value& v) { return v.get<std::string>(); }
};

// std::vector<uint8_t> is the byte-string type, not a sequence of u8.
template <>
struct WireCodec<std::vector<std::uint8_t>> {
  static Schema schema() { return Schema::bytes(); }
  static void encode(const std::vector<std::uint8_t>& v, Writer& w) {
    w.u64(v.size());
    w.raw(v.data(), v.size());
  }
  static std::vector<std::uint8_t> decode(Reader& r) {
    std::size_t n = r.length_prefix("bytes");
    auto s = r.raw(n, "bytes body");
    return std::vector<std::uint8_t>(s.begin(), s.end());
  }
  static Value to_value(const std::vector<std::uint8_t>& v) { return Value(v); }
  static std::vector<std::uint8_t> from_value(const Value& v) { return v.get<ByteString>(); }
};

namespace detail {

// Fixed-width arithmetic elements can be moved in bulk on little-endian hosts.
template <typename T>
concept BulkCopyable = (std::integral<T> || std::floating_point<T>) && !std::same_as<T, bool> &&
                       (std::endian::native == std::endian::little);

}  // namespace detail

template <typename T>
  requires requires { WireCodec<T>::schema(); }
struct WireCodec<std::vector<T>> {
  static Schema schema() { return Schema::sequence(WireCodec<T>::schema()); }

  static void encode(const std::vector<T>& v, Writer& w) {
    w.u64(v.size());
    if constexpr (detail::BulkCopyable<T>) {
      w.raw(v.data(), v.size() * sizeof(T));
    } else {
      for (const T& e : v) WireCodec<T>::encode(e, w);
    }
  }

  static std::vector<T> decode(Reader& r) {
    std::size_t at = r.offset();
    std::uint64_t n = r.u64();
    if constexpr (detail::BulkCopyable<T>) {
      if (n > r.remaining() / sizeof(T)) {
        throw DecodeError("sequence count " + std::to_string(n) + " exceeds remaining input", at);
      }
      std::vector<T> out(static_cast<std::size_t>(n));
      auto s = r.raw(static_cast<std::size_t>(n) * sizeof(T), "sequence body");
      std::memcpy(out.data(), s.data(), s.size());
      return out;
    } else {
      std::size_t min_sz = WireCodec<T>::schema().min_encoded_size();
      if (min_sz > 0 && n > r.remaining() / min_sz) {
        throw DecodeError("sequence count " + std::to_string(n) + " exceeds remaining input", at);
      }
      std::vector<T> out;
      out.reserve(static_cast<std::size_t>(n));
      for (std::uint64_t i = 0; i < n; ++i) out.push_back(WireCodec<T>::decode(r));
      return out;
    }
  }

  static Value to_value(const std::vector<T>& v) {
    SequenceValue s;
    s.items.reserve(v.size());
    for (const T& e : v) s.items.push_back(WireCodec<T>::to_value(e));
    return Value(std::move(s));
  }
  static std::vector<T> from_value(const Value& v) {
    const auto& s = v.get<SequenceValue>();
    std::vector<T> out;
    out.reserve(s.items.size());
    for (const Value& e : s.items) out.push_back(WireCodec<T>::from_value(e));
    return out;
  }
};

template <typename T>
  requires requires { WireCodec<T>::schema(); }
struct WireCodec<std::optional<T>> {
  static Schema schema() { return Schema::optional(WireCodec<T>::schema()); }

  static void encode(const std::optional<T>& v, Writer& w) {
    w.u8(v.has_value() ? 1 : 0);
    if (v.has_value()) WireCodec<T>::encode(*v, w);
  }

  static std::optional<T> decode(Reader& r) {
    std::size_t at = r.offset();
    std::uint8_t tag = r.u8();
    if (tag > 1) throw DecodeError("invalid optional tag " + std::to_string(tag), at);
    if (tag == 0) return std::nullopt;
    return WireCodec<T>::decode(r);
  }

  static Value to_value(const std::optional<T>& v) {
    OptionalValue o;
    if (v.has_value()) o.value = std::make_shared<Value>(WireCodec<T>::to_value(*v));
    return Value(std::move(o));
  }
  static std::optional<T> from_value(const Value& v) {
    const auto& o = v.get<OptionalValue>();
    if (!o.value) return std::nullopt;
    return WireCodec<T>::from_value(*o.value);
  }
};

// ---------------------------------------------------------------------------
// Record support for user-defined structs:
//
//   struct Point { std::int32_t x; std::int32_t y; };
//   CPPLESS_RECORD(Point, x, y);
//
// generates the WireCodec<Point> specialization with fields in listed order.

#define CPPLESS_WIRE_FE_1(M, T, a) M(T, a)
#define CPPLESS_WIRE_FE_2(M, T, a, ...) M(T, a) CPPLESS_WIRE_FE_1(M, T, __VA_ARGS__)
#define CPPLESS_WIRE_FE_3(M, T, a, ...) M(T, a) CPPLESS_WIRE_FE_2(M, T, __VA_ARGS__)
#define CPPLESS_WIRE_FE_4(M, T, a, ...) M(T, a) CPPLESS_WIRE_FE_3(M, T, __VA_ARGS__)
#define CPPLESS_WIRE_FE_5(M, T, a, ...) M(T, a) CPPLESS_WIRE_FE_4(M, T, __VA_ARGS__)
#define CPPLESS_WIRE_FE_6(M, T, a, ...) M(T, a) CPPLESS_WIRE_FE_5(M, T, __VA_ARGS__)
#define CPPLESS_WIRE_FE_7(M, T, a, ...) M(T, a) CPPLESS_WIRE_FE_6(M, T, __VA_ARGS__)
#define CPPLESS_WIRE_FE_8(M, T, a, ...) M(T, a) CPPLESS_WIRE_FE_7(M, T, __VA_ARGS__)
#define CPPLESS_WIRE_FE_PICK(_1, _2, _3, _4, _5, _6, _7, _8, NAME, ...) NAME
#define CPPLESS_WIRE_FOR_EACH(M, T, ...)                                                     \
  CPPLESS_WIRE_FE_PICK(__VA_ARGS__, CPPLESS_WIRE_FE_8, CPPLESS_WIRE_FE_7, CPPLESS_WIRE_FE_6, \
                       CPPLESS_WIRE_FE_5, CPPLESS_WIRE_FE_4, CPPLESS_WIRE_FE_3,              \
                       CPPLESS_WIRE_FE_2, CPPLESS_WIRE_FE_1)                                 \
  (M, T, __VA_ARGS__)

#define CPPLESS_WIRE_FIELD_SCHEMA(T, name) \
  fields.emplace_back(#name, ::cppless::wire::WireCodec<decltype(T::name)>::schema());
#define CPPLESS_WIRE_FIELD_ENCODE(T, name)                                      \
  try {                                                                         \
    ::cppless::wire::WireCodec<decltype(T::name)>::encode(v.name, w);           \
  } catch (const ::cppless::EncodeError& e) {                                   \
    throw ::cppless::EncodeError(std::string(e.what()) + " (in field ." #name ")"); \
  }
#define CPPLESS_WIRE_FIELD_DECODE(T, name) \
  out.name = ::cppless::wire::WireCodec<decltype(T::name)>::decode(r);
#define CPPLESS_WIRE_FIELD_TO_VALUE(T, name) \
  rec.fields.push_back(::cppless::wire::WireCodec<decltype(T::name)>::to_value(v.name));
#define CPPLESS_WIRE_FIELD_FROM_VALUE(T, name) \
  out.name = ::cppless::wire::WireCodec<decltype(T::name)>::from_value(rec.fields[idx++]);

// NOTE: use at global namespace scope.
#define CPPLESS_RECORD(TYPE, ...)                                                          \
  template <>                                                                              \
  struct cppless::wire::WireCodec<TYPE> {                                                  \
    static ::cppless::wire::Schema schema() {                                              \
      std::vector<::cppless::wire::Schema::Field> fields;                                  \
      CPPLESS_WIRE_FOR_EACH(CPPLESS_WIRE_FIELD_SCHEMA, TYPE, __VA_ARGS__)                  \
      return ::cppless::wire::Schema::record(std::move(fields));                           \
    }                                                                                      \
    static void encode(const TYPE& v, ::cppless::wire::Writer& w) {                        \
      CPPLESS_WIRE_FOR_EACH(CPPLESS_WIRE_FIELD_ENCODE, TYPE, __VA_ARGS__)                  \
    }                                                                                      \
    static TYPE decode(::cppless::wire::Reader& r) {                                       \
      TYPE out{};                                                                          \
      CPPLESS_WIRE_FOR_EACH(CPPLESS_WIRE_FIELD_DECODE, TYPE, __VA_ARGS__)                  \
      return out;                                                                          \
    }                                                                                      \
    static ::cppless::wire::Value to_value(const TYPE& v) {                                \
      ::cppless::wire::RecordValue rec;                                                    \
      CPPLESS_WIRE_FOR_EACH(CPPLESS_WIRE_FIELD_TO_VALUE, TYPE, __VA_ARGS__)                \
      return ::cppless::wire::Value(std::move(rec));                                       \
    }                                                                                      \
    static TYPE from_value(const ::cppless::wire::Value& v) {                              \
      const auto& rec = v.get<::cppless::wire::RecordValue>();                             \
      TYPE out{};                                                                          \
      std::size_t idx = 0;                                                                 \
      CPPLESS_WIRE_FOR_EACH(CPPLESS_WIRE_FIELD_FROM_VALUE, TYPE, __VA_ARGS__)              \
      return out;                                                                          \
    }                                                                                      \
  }

// ---------------------------------------------------------------------------

// A type is wire-serializable when a complete WireCodec specialization exists.
template <typename T>
concept WireSerializable = requires(const std::remove_cvref_t<T>& v, Writer& w, Reader& r) {
  { WireCodec<std::remove_cvref_t<T>>::schema() } -> std::same_as<Schema>;
  WireCodec<std::remove_cvref_t<T>>::encode(v, w);
  { WireCodec<std::remove_cvref_t<T>>::decode(r) } -> std::same_as<std::remove_cvref_t<T>>;
};

template <WireSerializable T>
std::vector<std::uint8_t> encode(const T& v) {
  std::vector<std::uint8_t> out;
  Writer w(out);
  WireCodec<std::remove_cvref_t<T>>::encode(v, w);
  return out;
}

template <WireSerializable T>
T decode(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  T v = WireCodec<std::remove_cvref_t<T>>::decode(r);
  if (!r.at_end()) {
    throw DecodeError(std::to_string(r.remaining()) + " trailing bytes after value", r.offset());
  }
  return v;
}

}  // namespace cppless::wire
