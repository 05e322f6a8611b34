#include "cppless/wire/schema.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "cppless/wire/bytes.hpp"

namespace cppless::wire {

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Bool: return "bool";
    case Kind::I8: return "i8";
    case Kind::I16: return "i16";
    case Kind::I32: return "i32";
    case Kind::I64: return "i64";
    case Kind::U8: return "u8";
    case Kind::U16: return "u16";
    case Kind::U32: return "u32";
    case Kind::U64: return "u64";
    case Kind::F32: return "f32";
    case Kind::F64: return "f64";
    case Kind::String: return "string";
    case Kind::Bytes: return "bytes";
    case Kind::Sequence: return "sequence";
    case Kind::Optional: return "optional";
    case Kind::Record: return "record";
  }
  return "?";
}

std::size_t Schema::min_encoded_size() const {
  switch (kind_) {
    case Kind::Bool:
    case Kind::I8:
    case Kind::U8:
      return 1;
    case Kind::I16:
    case Kind::U16:
      return 2;
    case Kind::I32:
    case Kind::U32:
    case Kind::F32:
      return 4;
    case Kind::I64:
    case Kind::U64:
    case Kind::F64:
    case Kind::String:
    case Kind::Bytes:
    case Kind::Sequence:
      return 8;  // length/count prefix
    case Kind::Optional:
      return 1;  // absent tag
    case Kind::Record: {
      std::size_t total = 0;
      for (const auto& [name, sub] : fields()) total += sub.min_encoded_size();
      return total;
    }
  }
  return 0;
}

std::string Schema::to_string() const {
  switch (kind_) {
    case Kind::Sequence:
      return "sequence(" + child().to_string() + ")";
    case Kind::Optional:
      return "optional(" + child().to_string() + ")";
    case Kind::Record: {
      std::string out = "record{";
      bool first = true;
      for (const auto& [name, sub] : fields()) {
        if (!first) out += ", ";
        first = false;
        out += name + ": " + sub.to_string();
      }
      return out + "}";
    }
    default:
      return kind_name(kind_);
  }
}

bool Schema::operator==(const Schema& other) const {
  if (kind_ != other.kind_) return false;
  switch (kind_) {
    case Kind::Sequence:
    case Kind::Optional:
      return child() == other.child();
    case Kind::Record: {
      const auto& a = fields();
      const auto& b = other.fields();
      if (a.size() != b.size()) return false;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].first != b[i].first || !(a[i].second == b[i].second)) return false;
      }
      return true;
    }
    default:
      return true;
  }
}

namespace {

template <typename F>
bool float_equal(F a, F b) {
  if (std::isnan(a) && std::isnan(b)) return true;
  using U = std::conditional_t<sizeof(F) == 4, std::uint32_t, std::uint64_t>;
  return std::bit_cast<U>(a) == std::bit_cast<U>(b);
}

}  // namespace

bool value_equal(const Value& a, const Value& b) {
  if (a.v.index() != b.v.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::remove_cvref_t<decltype(x)>;
        const T& y = std::get<T>(b.v);
        if constexpr (std::is_same_v<T, float> || std::is_same_v<T, double>) {
          return float_equal(x, y);
        } else if constexpr (std::is_same_v<T, SequenceValue>) {
          if (x.items.size() != y.items.size()) return false;
          for (std::size_t i = 0; i < x.items.size(); ++i) {
            if (!value_equal(x.items[i], y.items[i])) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, RecordValue>) {
          if (x.fields.size() != y.fields.size()) return false;
          for (std::size_t i = 0; i < x.fields.size(); ++i) {
            if (!value_equal(x.fields[i], y.fields[i])) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, OptionalValue>) {
          if (!x.value != !y.value) return false;
          if (!x.value) return true;
          return value_equal(*x.value, *y.value);
        } else {
          return x == y;
        }
      },
      a.v);
}

bool value_conforms(const Value& v, const Schema& s) {
  switch (s.kind()) {
    case Kind::Bool: return v.holds<bool>();
    case Kind::I8: return v.holds<std::int8_t>();
    case Kind::I16: return v.holds<std::int16_t>();
    case Kind::I32: return v.holds<std::int32_t>();
    case Kind::I64: return v.holds<std::int64_t>();
    case Kind::U8: return v.holds<std::uint8_t>();
    case Kind::U16: return v.holds<std::uint16_t>();
    case Kind::U32: return v.holds<std::uint32_t>();
    case Kind::U64: return v.holds<std::uint64_t>();
    case Kind::F32: return v.holds<float>();
    case Kind::F64: return v.holds<double>();
    case Kind::String: return v.holds<std::string>() && is_valid_utf8(v.get<std::string>());
    case Kind::Bytes: return v.holds<ByteString>();
    case Kind::Sequence: {
      if (!v.holds<SequenceValue>()) return false;
      for (const Value& e : v.get<SequenceValue>().items) {
        if (!value_conforms(e, s.child())) return false;
      }
      return true;
    }
    case Kind::Optional: {
      if (!v.holds<OptionalValue>()) return false;
      const auto& o = v.get<OptionalValue>();
      return !o.value || value_conforms(*o.value, s.child());
    }
    case Kind::Record: {
      if (!v.holds<RecordValue>()) return false;
      const auto& rec = v.get<RecordValue>();
      if (rec.fields.size() != s.fields().size()) return false;
      for (std::size_t i = 0; i < rec.fields.size(); ++i) {
        if (!value_conforms(rec.fields[i], s.fields()[i].second)) return false;
      }
      return true;
    }
  }
  return false;
}

bool is_valid_utf8(std::string_view s) {
  const auto* p = reinterpret_cast<const unsigned char*>(s.data());
  const auto* end = p + s.size();
  while (p < end) {
    unsigned char c = *p;
    if (c < 0x80) {
      ++p;
    } else if ((c & 0xE0) == 0xC0) {
      if (end - p < 2 || (p[1] & 0xC0) != 0x80) return false;
      unsigned cp = ((c & 0x1Fu) << 6) | (p[1] & 0x3Fu);
      if (cp < 0x80) return false;  // overlong
      p += 2;
    } else if ((c & 0xF0) == 0xE0) {
      if (end - p < 3 || (p[1] & 0xC0) != 0x80 || (p[2] & 0xC0) != 0x80) return false;
      unsigned cp = ((c & 0x0Fu) << 12) | ((p[1] & 0x3Fu) << 6) | (p[2] & 0x3Fu);
      if (cp < 0x800) return false;                  // overlong
      if (cp >= 0xD800 && cp <= 0xDFFF) return false;  // surrogate
      p += 3;
    } else if ((c & 0xF8) == 0xF0) {
      if (end - p < 4 || (p[1] & 0xC0) != 0x80 || (p[2] & 0xC0) != 0x80 ||
          (p[3] & 0xC0) != 0x80) {
        return false;
      }
      unsigned cp = ((c & 0x07u) << 18) | ((p[1] & 0x3Fu) << 12) | ((p[2] & 0x3Fu) << 6) |
                    (p[3] & 0x3Fu);
      if (cp < 0x10000 || cp > 0x10FFFF) return false;  // overlong or out of range
      p += 4;
    } else {
      return false;
    }
  }
  return true;
}

}  // namespace cppless::wire
