#include "cppless/wire/json_codec.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "cppless/error.hpp"
#include "cppless/wire/base64.hpp"

namespace cppless::wire {

namespace {

using nlohmann::json;

json float_to_json(double d) {
  if (std::isnan(d)) return json("NaN");
  if (std::isinf(d)) return json(d > 0 ? "Infinity" : "-Infinity");
  return json(d);
}

json to_json(const Value& v, const Schema& s, const std::string& path) {
  switch (s.kind()) {
    case Kind::Bool: return json(v.get<bool>());
    case Kind::I8: return json(v.get<std::int8_t>());
    case Kind::I16: return json(v.get<std::int16_t>());
    case Kind::I32: return json(v.get<std::int32_t>());
    case Kind::I64: return json(v.get<std::int64_t>());
    case Kind::U8: return json(v.get<std::uint8_t>());
    case Kind::U16: return json(v.get<std::uint16_t>());
    case Kind::U32: return json(v.get<std::uint32_t>());
    case Kind::U64: return json(v.get<std::uint64_t>());
    case Kind::F32: return float_to_json(static_cast<double>(v.get<float>()));
    case Kind::F64: return float_to_json(v.get<double>());
    case Kind::String: return json(v.get<std::string>());
    case Kind::Bytes: return json(base64_encode(v.get<ByteString>()));
    case Kind::Sequence: {
      json arr = json::array();
      const auto& seq = v.get<SequenceValue>();
      for (std::size_t i = 0; i < seq.items.size(); ++i) {
        arr.push_back(to_json(seq.items[i], s.child(), path + "[" + std::to_string(i) + "]"));
      }
      return arr;
    }
    case Kind::Optional: {
      const auto& opt = v.get<OptionalValue>();
      if (!opt.value) return json(nullptr);
      return to_json(*opt.value, s.child(), path);
    }
    case Kind::Record: {
      json obj = json::object();
      const auto& rec = v.get<RecordValue>();
      const auto& fields = s.fields();
      if (rec.fields.size() != fields.size()) {
        throw JsonCodecError("record arity mismatch", path);
      }
      for (std::size_t i = 0; i < fields.size(); ++i) {
        obj[fields[i].first] = to_json(rec.fields[i], fields[i].second, path + "." + fields[i].first);
      }
      return obj;
    }
  }
  throw JsonCodecError("corrupt schema", path);
}

[[noreturn]] void fail(const std::string& what, const std::string& path) {
  throw JsonCodecError(what, path);
}

std::int64_t expect_signed(const json& j, std::int64_t lo, std::int64_t hi,
                           const std::string& path) {
  if (j.is_number_float()) fail("integer schema refuses float transit", path);
  if (!j.is_number_integer()) fail("expected integer, got " + std::string(j.type_name()), path);
  if (j.is_number_unsigned() && j.get<std::uint64_t>() >
                                    static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
    fail("integer out of range", path);
  }
  std::int64_t v = j.get<std::int64_t>();
  if (v < lo || v > hi) fail("integer " + std::to_string(v) + " out of range", path);
  return v;
}

std::uint64_t expect_unsigned(const json& j, std::uint64_t hi, const std::string& path) {
  if (j.is_number_float()) fail("integer schema refuses float transit", path);
  if (!j.is_number_integer()) fail("expected integer, got " + std::string(j.type_name()), path);
  if (!j.is_number_unsigned()) {
    // parsed as signed; negative is out of domain
    if (j.get<std::int64_t>() < 0) fail("negative value for unsigned schema", path);
  }
  std::uint64_t v = j.get<std::uint64_t>();
  if (v > hi) fail("integer " + std::to_string(v) + " out of range", path);
  return v;
}

double expect_float(const json& j, const std::string& path) {
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "NaN") return std::numeric_limits<double>::quiet_NaN();
    if (s == "Infinity") return std::numeric_limits<double>::infinity();
    if (s == "-Infinity") return -std::numeric_limits<double>::infinity();
    fail("expected number or non-finite token, got string \"" + s + "\"", path);
  }
  if (!j.is_number()) fail("expected number, got " + std::string(j.type_name()), path);
  return j.get<double>();
}

Value from_json(const json& j, const Schema& s, const std::string& path) {
  switch (s.kind()) {
    case Kind::Bool:
      if (!j.is_boolean()) fail("expected bool, got " + std::string(j.type_name()), path);
      return Value(j.get<bool>());
    case Kind::I8:
      return Value(static_cast<std::int8_t>(expect_signed(j, -128, 127, path)));
    case Kind::I16:
      return Value(static_cast<std::int16_t>(expect_signed(j, -32768, 32767, path)));
    case Kind::I32:
      return Value(static_cast<std::int32_t>(
          expect_signed(j, std::numeric_limits<std::int32_t>::min(),
                        std::numeric_limits<std::int32_t>::max(), path)));
    case Kind::I64:
      return Value(expect_signed(j, std::numeric_limits<std::int64_t>::min(),
                                 std::numeric_limits<std::int64_t>::max(), path));
    case Kind::U8:
      return Value(static_cast<std::uint8_t>(expect_unsigned(j, 255, path)));
    case Kind::U16:
      return Value(static_cast<std::uint16_t>(expect_unsigned(j, 65535, path)));
    case Kind::U32:
      return Value(static_cast<std::uint32_t>(
          expect_unsigned(j, std::numeric_limits<std::uint32_t>::max(), path)));
    case Kind::U64:
      return Value(expect_unsigned(j, std::numeric_limits<std::uint64_t>::max(), path));
    case Kind::F32:
      return Value(static_cast<float>(expect_float(j, path)));
    case Kind::F64:
      return Value(expect_float(j, path));
    case Kind::String:
      if (!j.is_string()) fail("expected string, got " + std::string(j.type_name()), path);
      return Value(j.get<std::string>());
    case Kind::Bytes: {
      if (!j.is_string()) fail("expected Base64 string, got " + std::string(j.type_name()), path);
      try {
        return Value(base64_decode(j.get_ref<const std::string&>()));
      } catch (const CarrierError& e) {
        fail(e.what(), path);
      }
    }
    case Kind::Sequence: {
      if (!j.is_array()) fail("expected array, got " + std::string(j.type_name()), path);
      SequenceValue seq;
      seq.items.reserve(j.size());
      for (std::size_t i = 0; i < j.size(); ++i) {
        seq.items.push_back(from_json(j[i], s.child(), path + "[" + std::to_string(i) + "]"));
      }
      return Value(std::move(seq));
    }
    case Kind::Optional: {
      OptionalValue opt;
      if (!j.is_null()) opt.value = std::make_shared<Value>(from_json(j, s.child(), path));
      return Value(std::move(opt));
    }
    case Kind::Record: {
      if (!j.is_object()) fail("expected object, got " + std::string(j.type_name()), path);
      const auto& fields = s.fields();
      RecordValue rec;
      rec.fields.reserve(fields.size());
      for (const auto& [name, sub] : fields) {
        auto it = j.find(name);
        if (it == j.end()) fail("missing record field", path + "." + name);
        rec.fields.push_back(from_json(*it, sub, path + "." + name));
      }
      if (j.size() != fields.size()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
          bool known = false;
          for (const auto& [name, sub] : fields) {
            if (name == it.key()) {
              known = true;
              break;
            }
          }
          if (!known) fail("unknown record field", path + "." + it.key());
        }
      }
      return Value(std::move(rec));
    }
  }
  fail("corrupt schema", path);
}

}  // namespace

std::string encode_json_value(const Value& v, const Schema& schema) {
  if (!value_conforms(v, schema)) {
    throw EncodeError("value does not conform to schema " + schema.to_string());
  }
  return to_json(v, schema, "$").dump();
}

Value decode_json_value(std::string_view text, const Schema& schema) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw JsonCodecError(std::string("input is not valid JSON: ") + e.what(), "$");
  }
  return from_json(j, schema, "$");
}

}  // namespace cppless::wire
