#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cppless::wire {

// RFC 4648 standard alphabet with '=' padding.
std::string base64_encode(std::span<const std::uint8_t> data);

// Strict inverse: rejects characters outside the alphabet, lengths not a
// multiple of 4, and misplaced padding. Throws CarrierError.
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace cppless::wire
