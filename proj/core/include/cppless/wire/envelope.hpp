#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cppless::wire {

// Fixed cross-process frame: 4-byte magic "CPLS", u16 version, u8 kind, body.
// Total length is always 7 + body length.

inline constexpr char kEnvelopeMagic[4] = {'C', 'P', 'L', 'S'};
inline constexpr std::uint16_t kEnvelopeVersion = 1;
inline constexpr std::size_t kEnvelopeHeaderSize = 7;

enum class EnvelopeKind : std::uint8_t {
  request = 0,
  response_ok = 1,
  response_err = 2,
};

struct Envelope {
  EnvelopeKind kind;
  std::vector<std::uint8_t> body;
};

std::vector<std::uint8_t> encode_envelope(EnvelopeKind kind, std::span<const std::uint8_t> body);

// Throws EnvelopeError on wrong magic, unsupported version, or invalid kind.
Envelope decode_envelope(std::span<const std::uint8_t> bytes);

// ---------------------------------------------------------------------------
// Base64-in-JSON carrier: the single-key object {"payload": "<base64>"} that
// REST-style ingress requires around binary envelopes.

std::string wrap_base64_json(std::span<const std::uint8_t> bytes);

// Throws CarrierError on anything that is not exactly a {"payload": ...}
// object with a valid Base64 string value.
std::vector<std::uint8_t> unwrap_base64_json(std::string_view carrier_text);

}  // namespace cppless::wire
