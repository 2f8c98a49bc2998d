#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace mtkit {

// SHA-256 of `data` as a lowercase hex string.
std::string sha256_hex(std::string_view data);

// SHA-256 of a file's contents; throws std::runtime_error if unreadable.
std::string sha256_file_hex(const std::string& path);

// First 128 bits of SHA-256, as two words. Used as the dedup key digest:
// 16 bytes per record regardless of text size.
struct Digest128 {
  uint64_t hi = 0;
  uint64_t lo = 0;
  bool operator==(const Digest128&) const = default;
};

Digest128 digest128(std::string_view data);

struct Digest128Hash {
  size_t operator()(const Digest128& d) const noexcept {
    return static_cast<size_t>(d.hi ^ (d.lo * 0x9E3779B97F4A7C15ull));
  }
};

}  // namespace mtkit
