#pragma once

#include <string>
#include <string_view>

namespace mtkit {

// Dedup key normalization: Unicode NFC, then full case folding, then
// whitespace runs collapsed to a single space with ends trimmed. Raw record
// text is never modified; this is only used to build comparison keys.
std::string normalize_key(std::string_view text);

}  // namespace mtkit
