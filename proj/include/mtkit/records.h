#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace mtkit {

// A single-language text. token_count is filled in when a tokenizer has
// counted the text; 0 means "not yet counted".
struct MonoRecord {
  std::string lang;
  std::string text;
  int64_t token_count = 0;

  bool operator==(const MonoRecord&) const = default;
};

// A sentence pair. similarity, when present, is a semantic score in [0, 1]
// attached at ingest or joined from a sidecar.
struct ParallelRecord {
  std::string src_lang;
  std::string tgt_lang;
  std::string src_text;
  std::string tgt_text;
  std::optional<double> similarity;
  std::string provenance;

  bool operator==(const ParallelRecord&) const = default;
};

}  // namespace mtkit
