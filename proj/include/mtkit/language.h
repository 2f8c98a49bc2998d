#pragma once

#include <string>
#include <vector>

namespace mtkit {

enum class ResourceClass { High, Mid, Low };

const char* to_string(ResourceClass c);
ResourceClass resource_class_from_string(const std::string& s);

struct LanguageEntry {
  std::string iso_code;      // 2-letter tag
  std::string name;          // display name, e.g. "German"
  std::string script;
  std::string family;
  std::string subgrouping;
  ResourceClass resource_class;
};

// The 28 supported languages, sorted by iso_code.
const std::vector<LanguageEntry>& load_registry();

bool is_supported(const std::string& iso_code);

// Lookup by iso_code; throws std::out_of_range for unknown codes.
const LanguageEntry& language(const std::string& iso_code);

// An ordered translation direction between two registry languages.
struct Direction {
  std::string src;
  std::string tgt;

  Direction() = default;
  // Validates both codes against the registry and src != tgt.
  Direction(std::string src_code, std::string tgt_code);

  std::string str() const { return src + "-" + tgt; }
  // Parses "src-tgt"; throws std::invalid_argument on bad input.
  static Direction parse(const std::string& s);

  bool operator==(const Direction&) const = default;
  bool operator<(const Direction& o) const {
    return src != o.src ? src < o.src : tgt < o.tgt;
  }
};

}  // namespace mtkit
