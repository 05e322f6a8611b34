#include "cppless/wire/binary.hpp"

namespace cppless::wire {

namespace {

const char* held_name(const Value& v) {
  switch (v.v.index()) {
    case 0: return "bool";
    case 1: return "i8";
    case 2: return "i16";
    case 3: return "i32";
    case 4: return "i64";
    case 5: return "u8";
    case 6: return "u16";
    case 7: return "u32";
    case 8: return "u64";
    case 9: return "f32";
    case 10: return "f64";
    case 11: return "string";
    case 12: return "bytes";
    case 13: return "sequence";
    case 14: return "optional";
    case 15: return "record";
  }
  return "?";
}

[[noreturn]] void throw_mismatch(const Value& v, const Schema& s, const std::string& path) {
  throw EncodeError("type mismatch at " + path + ": schema expects " + kind_name(s.kind()) +
                    ", value holds " + held_name(v));
}

}  // namespace

void encode_value_into(const Value& v, const Schema& s, Writer& w, const std::string& path) {
  switch (s.kind()) {
    case Kind::Bool:
      if (!v.holds<bool>()) throw_mismatch(v, s, path);
      w.boolean(v.get<bool>());
      return;
    case Kind::I8:
      if (!v.holds<std::int8_t>()) throw_mismatch(v, s, path);
      w.i8(v.get<std::int8_t>());
      return;
    case Kind::I16:
      if (!v.holds<std::int16_t>()) throw_mismatch(v, s, path);
      w.i16(v.get<std::int16_t>());
      return;
    case Kind::I32:
      if (!v.holds<std::int32_t>()) throw_mismatch(v, s, path);
      w.i32(v.get<std::int32_t>());
      return;
    case Kind::I64:
      if (!v.holds<std::int64_t>()) throw_mismatch(v, s, path);
      w.i64(v.get<std::int64_t>());
      return;
    case Kind::U8:
      if (!v.holds<std::uint8_t>()) throw_mismatch(v, s, path);
      w.u8(v.get<std::uint8_t>());
      return;
    case Kind::U16:
      if (!v.holds<std::uint16_t>()) throw_mismatch(v, s, path);
      w.u16(v.get<std::uint16_t>());
      return;
    case Kind::U32:
      if (!v.holds<std::uint32_t>()) throw_mismatch(v, s, path);
      w.u32(v.get<std::uint32_t>());
      return;
    case Kind::U64:
      if (!v.holds<std::uint64_t>()) throw_mismatch(v, s, path);
      w.u64(v.get<std::uint64_t>());
      return;
    case Kind::F32:
      if (!v.holds<float>()) throw_mismatch(v, s, path);
      w.f32(v.get<float>());
      return;
    case Kind::F64:
      if (!v.holds<double>()) throw_mismatch(v, s, path);
      w.f64(v.get<double>());
      return;
    case Kind::String: {
      if (!v.holds<std::string>()) throw_mismatch(v, s, path);
      const auto& str = v.get<std::string>();
      if (!is_valid_utf8(str)) {
        throw EncodeError("invalid UTF-8 in string at " + path);
      }
      w.u64(str.size());
      w.raw(str.data(), str.size());
      return;
    }
    case Kind::Bytes: {
      if (!v.holds<ByteString>()) throw_mismatch(v, s, path);
      const auto& b = v.get<ByteString>();
      w.u64(b.size());
      w.raw(b.data(), b.size());
      return;
    }
    case Kind::Sequence: {
      if (!v.holds<SequenceValue>()) throw_mismatch(v, s, path);
      const auto& seq = v.get<SequenceValue>();
      w.u64(seq.items.size());
      for (std::size_t i = 0; i < seq.items.size(); ++i) {
        encode_value_into(seq.items[i], s.child(), w, path + "[" + std::to_string(i) + "]");
      }
      return;
    }
    case Kind::Optional: {
      if (!v.holds<OptionalValue>()) throw_mismatch(v, s, path);
      const auto& opt = v.get<OptionalValue>();
      w.u8(opt.value ? 1 : 0);
      if (opt.value) encode_value_into(*opt.value, s.child(), w, path);
      return;
    }
    case Kind::Record: {
      if (!v.holds<RecordValue>()) throw_mismatch(v, s, path);
      const auto& rec = v.get<RecordValue>();
      const auto& fields = s.fields();
      if (rec.fields.size() != fields.size()) {
        throw EncodeError("record arity mismatch at " + path + ": schema has " +
                          std::to_string(fields.size()) + " fields, value has " +
                          std::to_string(rec.fields.size()));
      }
      for (std::size_t i = 0; i < fields.size(); ++i) {
        encode_value_into(rec.fields[i], fields[i].second, w, path + "." + fields[i].first);
      }
      return;
    }
  }
}

Value decode_value_from(Reader& r, const Schema& s) {
  switch (s.kind()) {
    case Kind::Bool: {
      std::size_t at = r.offset();
      std::uint8_t b = r.u8();
      if (b > 1) throw DecodeError("invalid bool byte " + std::to_string(b), at);
      return Value(b == 1);
    }
    case Kind::I8: return Value(r.i8());
    case Kind::I16: return Value(r.i16());
    case Kind::I32: return Value(r.i32());
    case Kind::I64: return Value(r.i64());
    case Kind::U8: return Value(r.u8());
    case Kind::U16: return Value(r.u16());
    case Kind::U32: return Value(r.u32());
    case Kind::U64: return Value(r.u64());
    case Kind::F32: return Value(r.f32());
    case Kind::F64: return Value(r.f64());
    case Kind::String: {
      std::size_t at = r.offset();
      std::size_t n = r.length_prefix("string");
      auto span = r.raw(n, "string body");
      std::string out(reinterpret_cast<const char*>(span.data()), span.size());
      if (!is_valid_utf8(out)) throw DecodeError("invalid UTF-8 in string", at);
      return Value(std::move(out));
    }
    case Kind::Bytes: {
      std::size_t n = r.length_prefix("bytes");
      auto span = r.raw(n, "bytes body");
      return Value(ByteString(span.begin(), span.end()));
    }
    case Kind::Sequence: {
      std::size_t at = r.offset();
      std::uint64_t n = r.u64();
      std::size_t min_sz = s.child().min_encoded_size();
      if (min_sz > 0) {
        if (n > r.remaining() / min_sz) {
          throw DecodeError("sequence count " + std::to_string(n) + " exceeds remaining input",
                            at);
        }
      } else if (n > 1'000'000) {
        // zero-minimum elements (empty records) get a sanity cap instead
        throw DecodeError("sequence count " + std::to_string(n) +
                              " of zero-size elements exceeds sanity cap",
                          at);
      }
      SequenceValue seq;
      seq.items.reserve(static_cast<std::size_t>(n));
      for (std::uint64_t i = 0; i < n; ++i) seq.items.push_back(decode_value_from(r, s.child()));
      return Value(std::move(seq));
    }
    case Kind::Optional: {
      std::size_t at = r.offset();
      std::uint8_t tag = r.u8();
      if (tag > 1) throw DecodeError("invalid optional tag " + std::to_string(tag), at);
      OptionalValue opt;
      if (tag == 1) opt.value = std::make_shared<Value>(decode_value_from(r, s.child()));
      return Value(std::move(opt));
    }
    case Kind::Record: {
      RecordValue rec;
      rec.fields.reserve(s.fields().size());
      for (const auto& [name, sub] : s.fields()) rec.fields.push_back(decode_value_from(r, sub));
      return Value(std::move(rec));
    }
  }
  throw DecodeError("corrupt schema kind", r.offset());
}

std::vector<std::uint8_t> encode_value(const Value& v, const Schema& schema) {
  std::vector<std::uint8_t> out;
  Writer w(out);
  encode_value_into(v, schema, w, "$");
  return out;
}

Value decode_value(std::span<const std::uint8_t> bytes, const Schema& schema) {
  Reader r(bytes);
  Value v = decode_value_from(r, schema);
  if (!r.at_end()) {
    throw DecodeError(std::to_string(r.remaining()) + " trailing bytes after value", r.offset());
  }
  return v;
}

}  // namespace cppless::wire
