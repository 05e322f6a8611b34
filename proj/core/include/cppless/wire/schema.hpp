#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cppless/error.hpp"

namespace cppless::wire {

// The closed serialization grammar. Sequence/Optional carry one child schema,
// Record an ordered field list; everything else is a leaf.
enum class Kind : std::uint8_t {
  Bool,
  I8,
  I16,
  I32,
  I64,
  U8,
  U16,
  U32,
  U64,
  F32,
  F64,
  String,
  Bytes,
  Sequence,
  Optional,
  Record,
};

const char* kind_name(Kind k);

class Schema {
 public:
  using Field = std::pair<std::string, Schema>;

  static Schema boolean() { return Schema(Kind::Bool); }
  static Schema i8() { return Schema(Kind::I8); }
  static Schema i16() { return Schema(Kind::I16); }
  static Schema i32() { return Schema(Kind::I32); }
  static Schema i64() { return Schema(Kind::I64); }
  static Schema u8() { return Schema(Kind::U8); }
  static Schema u16() { return Schema(Kind::U16); }
  static Schema u32() { return Schema(Kind::U32); }
  static Schema u64() { return Schema(Kind::U64); }
  static Schema f32() { return Schema(Kind::F32); }
  static Schema f64() { return Schema(Kind::F64); }
  static Schema string() { return Schema(Kind::String); }
  static Schema bytes() { return Schema(Kind::Bytes); }

  static Schema sequence(Schema element) {
    Schema s(Kind::Sequence);
    s.child_ = std::make_shared<Schema>(std::move(element));
    return s;
  }

  // optional(optional(T)) is rejected: the JSON mapping uses null for the
  // absent case, which cannot distinguish nesting levels.
  static Schema optional(Schema inner) {
    if (inner.kind() == Kind::Optional) {
      throw ConfigError("optional(optional(...)) is not a valid schema");
    }
    Schema s(Kind::Optional);
    s.child_ = std::make_shared<Schema>(std::move(inner));
    return s;
  }

  static Schema record(std::vector<Field> fields) {
    Schema s(Kind::Record);
    s.fields_ = std::make_shared<std::vector<Field>>(std::move(fields));
    return s;
  }

  Kind kind() const { return kind_; }

  bool is_leaf() const { return !child_ && !fields_; }

  const Schema& child() const { return *child_; }

  const std::vector<Field>& fields() const { return *fields_; }

  // Smallest number of bytes any value of this schema can occupy; used to
  // sanity-check sequence counts before allocating.
  std::size_t min_encoded_size() const;

  // Human-readable rendering, e.g. "sequence(optional(u32))".
  std::string to_string() const;

  bool operator==(const Schema& other) const;

 private:
  explicit Schema(Kind k) : kind_(k) {}

  Kind kind_;
  std::shared_ptr<const Schema> child_;                      // Sequence / Optional
  std::shared_ptr<const std::vector<Field>> fields_;         // Record
};

// ---------------------------------------------------------------------------
// Dynamically-typed value tree mirroring Schema, used by the generic codecs
// and the randomized round-trip tests.

struct Value;

struct SequenceValue {
  std::vector<Value> items;
};

struct RecordValue {
  std::vector<Value> fields;  // positional; names live in the schema
};

struct OptionalValue {
  std::shared_ptr<Value> value;  // null means absent
};

using ByteString = std::vector<std::uint8_t>;

struct Value {
  using Storage =
      std::variant<bool, std::int8_t, std::int16_t, std::int32_t, std::int64_t, std::uint8_t,
                   std::uint16_t, std::uint32_t, std::uint64_t, float, double, std::string,
                   ByteString, SequenceValue, OptionalValue, RecordValue>;

  Storage v;

  Value() : v(false) {}
  template <typename T>
    requires std::constructible_from<Storage, T&&>
  Value(T&& x) : v(std::forward<T>(x)) {}  // NOLINT: implicit by design

  template <typename T>
  bool holds() const {
    return std::holds_alternative<T>(v);
  }
  template <typename T>
  const T& get() const {
    return std::get<T>(v);
  }
  template <typename T>
  T& get() {
    return std::get<T>(v);
  }
};

// Structural equality. Floats compare by bit pattern except that any two NaNs
// are considered equal (the JSON mode canonicalizes NaN payloads).
bool value_equal(const Value& a, const Value& b);

// Checks a value strictly conforms to a schema (shape only, not ranges).
bool value_conforms(const Value& v, const Schema& s);

}  // namespace cppless::wire
