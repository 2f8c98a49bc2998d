#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mtkit {

using TokenId = uint32_t;

// Deterministic text-to-token mapping. encode("") is always empty. Ids are
// only meaningful within one instance; equal texts encode equally, which is
// all the length and n-gram metrics need.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual const std::string& name() const = 0;
  virtual std::vector<TokenId> encode(std::string_view text) const = 0;

  int64_t count(std::string_view text) const {
    return static_cast<int64_t>(encode(text).size());
  }
};

// Splits on Unicode whitespace runs; each distinct piece gets an interned id.
class WhitespaceTokenizer : public Tokenizer {
 public:
  const std::string& name() const override { return name_; }
  std::vector<TokenId> encode(std::string_view text) const override;

 private:
  TokenId intern(const std::string& piece) const;

  std::string name_ = "whitespace";
  mutable std::mutex mu_;
  mutable std::unordered_map<std::string, TokenId> ids_;
};

// One token per codepoint; the id is the codepoint value.
class CharTokenizer : public Tokenizer {
 public:
  const std::string& name() const override { return name_; }
  std::vector<TokenId> encode(std::string_view text) const override;

 private:
  std::string name_ = "char";
};

// Greedy longest-match over a piece list (one piece per line, id = line
// index). An approximation adapter for external subword tokenizers: exact
// merge rules stay outside, the piece inventory is enough for length and
// n-gram statistics. Codepoints not covered by any piece become single
// out-of-vocabulary tokens.
class VocabTokenizer : public Tokenizer {
 public:
  explicit VocabTokenizer(const std::string& vocab_path);

  const std::string& name() const override { return name_; }
  std::vector<TokenId> encode(std::string_view text) const override;

 private:
  std::string name_;
  std::unordered_map<std::string, TokenId> pieces_;
  size_t max_piece_bytes_ = 0;
};

// Parses a tokenizer spec: "whitespace" | "char" | "vocab:PATH".
std::shared_ptr<Tokenizer> make_tokenizer(const std::string& spec);

}  // namespace mtkit
