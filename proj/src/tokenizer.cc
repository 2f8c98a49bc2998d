#include "mtkit/tokenizer.h"

#include <fstream>
#include <stdexcept>

#include "mtkit/util.h"

namespace mtkit {

std::vector<TokenId> WhitespaceTokenizer::encode(std::string_view text) const {
  std::vector<TokenId> out;
  std::string piece;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t start = pos;
    char32_t cp = decode_utf8(text, pos);
    if (is_space(cp)) {
      if (!piece.empty()) {
        out.push_back(intern(piece));
        piece.clear();
      }
    } else {
      piece.append(text.substr(start, pos - start));
    }
  }
  if (!piece.empty()) out.push_back(intern(piece));
  return out;
}

TokenId WhitespaceTokenizer::intern(const std::string& piece) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, inserted] = ids_.emplace(piece, static_cast<TokenId>(ids_.size()));
  return it->second;
}

std::vector<TokenId> CharTokenizer::encode(std::string_view text) const {
  std::vector<TokenId> out;
  size_t pos = 0;
  while (pos < text.size()) out.push_back(static_cast<TokenId>(decode_utf8(text, pos)));
  return out;
}

VocabTokenizer::VocabTokenizer(const std::string& vocab_path)
    : name_("vocab:" + vocab_path) {
  std::ifstream in(vocab_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open vocabulary: " + vocab_path);
  std::string line;
  TokenId id = 0;
  while (std::getline(in, line)) {
    line = strip_trailing_cr(std::move(line));
    if (line.empty()) continue;
    if (pieces_.emplace(line, id).second) {
      max_piece_bytes_ = std::max(max_piece_bytes_, line.size());
      ++id;
    }
  }
  if (pieces_.empty())
    throw std::runtime_error("empty vocabulary: " + vocab_path);
}

std::vector<TokenId> VocabTokenizer::encode(std::string_view text) const {
  std::vector<TokenId> out;
  size_t pos = 0;
  const TokenId oov_base = static_cast<TokenId>(pieces_.size());
  while (pos < text.size()) {
    size_t longest = std::min(max_piece_bytes_, text.size() - pos);
    bool matched = false;
    for (size_t len = longest; len >= 1; --len) {
      auto it = pieces_.find(std::string(text.substr(pos, len)));
      if (it != pieces_.end()) {
        out.push_back(it->second);
        pos += len;
        matched = true;
        break;
      }
    }
    if (!matched) {
      // Out-of-vocabulary codepoint: one token, id offset by the vocab size
      // so it can never collide with a piece id.
      char32_t cp = decode_utf8(text, pos);
      out.push_back(oov_base + static_cast<TokenId>(cp));
    }
  }
  return out;
}

std::shared_ptr<Tokenizer> make_tokenizer(const std::string& spec) {
  if (spec == "whitespace") return std::make_shared<WhitespaceTokenizer>();
  if (spec == "char") return std::make_shared<CharTokenizer>();
  if (spec.rfind("vocab:", 0) == 0)
    return std::make_shared<VocabTokenizer>(spec.substr(6));
  throw std::invalid_argument(
      "unknown tokenizer spec (want whitespace | char | vocab:PATH): " + spec);
}

}  // namespace mtkit
