#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mtkit {

// Decodes one UTF-8 codepoint starting at `pos`. Returns the codepoint and
// advances `pos` past it. Invalid sequences decode to U+FFFD and advance by
// one byte.
char32_t decode_utf8(std::string_view s, size_t& pos);

// Returns byte offset of the first invalid UTF-8 sequence, or nullopt if the
// string is well-formed.
std::optional<size_t> find_invalid_utf8(std::string_view s);

std::vector<char32_t> to_codepoints(std::string_view s);
void append_utf8(std::string& out, char32_t cp);

size_t codepoint_count(std::string_view s);

bool is_space(char32_t cp);

std::string_view trim(std::string_view s);
std::string strip_trailing_cr(std::string s);

std::vector<std::string_view> split(std::string_view s, char sep);

}  // namespace mtkit
