#pragma once

#include <string>
#include <string_view>

#include "cppless/wire/binary.hpp"
#include "cppless/wire/schema.hpp"

namespace cppless::wire {

// Plain-JSON codec: the third serialization mode (binary, Base64 carrier,
// JSON). Mapping: integers/floats as numbers (64-bit integers in full digits,
// never through float), non-finite floats as the string tokens "NaN" /
// "Infinity" / "-Infinity", bytes as Base64 strings, sequences as arrays,
// records as objects keyed by field name, absent optionals as null.

std::string encode_json_value(const Value& v, const Schema& schema);

// Throws JsonCodecError with the JSON path on any shape/type/range mismatch.
Value decode_json_value(std::string_view text, const Schema& schema);

template <WireSerializable T>
std::string encode_json(const T& v) {
  using C = WireCodec<std::remove_cvref_t<T>>;
  return encode_json_value(C::to_value(v), C::schema());
}

template <WireSerializable T>
T decode_json(std::string_view text) {
  using C = WireCodec<std::remove_cvref_t<T>>;
  return C::from_value(decode_json_value(text, C::schema()));
}

}  // namespace cppless::wire
