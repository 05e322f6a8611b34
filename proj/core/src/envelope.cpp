#include "cppless/wire/envelope.hpp"

#include <cstring>

#include <nlohmann/json.hpp>

#include "cppless/error.hpp"
#include "cppless/wire/base64.hpp"
#include "cppless/wire/bytes.hpp"

namespace cppless::wire {

std::vector<std::uint8_t> encode_envelope(EnvelopeKind kind, std::span<const std::uint8_t> body) {
  std::vector<std::uint8_t> out;
  out.reserve(kEnvelopeHeaderSize + body.size());
  Writer w(out);
  w.raw(kEnvelopeMagic, 4);
  w.u16(kEnvelopeVersion);
  w.u8(static_cast<std::uint8_t>(kind));
  w.raw(body.data(), body.size());
  return out;
}

Envelope decode_envelope(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kEnvelopeHeaderSize) {
    throw EnvelopeError("envelope too short: " + std::to_string(bytes.size()) +
                        " bytes, need at least " + std::to_string(kEnvelopeHeaderSize));
  }
  if (std::memcmp(bytes.data(), kEnvelopeMagic, 4) != 0) {
    throw EnvelopeError("bad envelope magic");
  }
  Reader r(bytes.subspan(4));
  std::uint16_t version = r.u16();
  if (version != kEnvelopeVersion) {
    throw EnvelopeError("unsupported envelope version " + std::to_string(version));
  }
  std::uint8_t kind = r.u8();
  if (kind > 2) {
    throw EnvelopeError("invalid envelope kind " + std::to_string(kind));
  }
  Envelope env;
  env.kind = static_cast<EnvelopeKind>(kind);
  env.body.assign(bytes.begin() + kEnvelopeHeaderSize, bytes.end());
  return env;
}

std::string wrap_base64_json(std::span<const std::uint8_t> bytes) {
  nlohmann::json j;
  j["payload"] = base64_encode(bytes);
  return j.dump();
}

std::vector<std::uint8_t> unwrap_base64_json(std::string_view carrier_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(carrier_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw CarrierError(std::string("carrier is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw CarrierError("carrier is not a JSON object");
  if (!j.contains("payload")) throw CarrierError("missing payload key");
  if (j.size() != 1) throw CarrierError("carrier must contain only the payload key");
  const auto& p = j.at("payload");
  if (!p.is_string()) throw CarrierError("payload value is not a string");
  return base64_decode(p.get_ref<const std::string&>());
}

}  // namespace cppless::wire
