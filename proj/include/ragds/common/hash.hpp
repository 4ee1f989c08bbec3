#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace ragds {

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

/// First 8 bytes of SHA-256 as a big-endian integer. Stable across
/// platforms, used wherever a seed has to be derived from text.
std::uint64_t sha256_u64(std::string_view data);

std::uint32_t crc32(std::span<const unsigned char> data);

}  // namespace ragds
