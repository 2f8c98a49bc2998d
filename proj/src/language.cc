#include "mtkit/language.h"

#include <stdexcept>
#include <unordered_map>

namespace mtkit {

const char* to_string(ResourceClass c) {
  switch (c) {
    case ResourceClass::High:
      return "high";
    case ResourceClass::Mid:
      return "mid";
    case ResourceClass::Low:
      return "low";
  }
  return "?";
}

ResourceClass resource_class_from_string(const std::string& s) {
  if (s == "high" || s == "High") return ResourceClass::High;
  if (s == "mid" || s == "Mid") return ResourceClass::Mid;
  if (s == "low" || s == "Low") return ResourceClass::Low;
  throw std::invalid_argument("unknown resource class: " + s);
}

const std::vector<LanguageEntry>& load_registry() {
  using R = ResourceClass;
  static const std::vector<LanguageEntry> registry = {
      {"ar", "Arabic", "Arabic", "Afro-Asiatic", "Semitic", R::High},
      {"bn", "Bengali", "Bengali", "Indo-European", "Indo-Aryan", R::Mid},
      {"cs", "Czech", "Latin", "Indo-European", "Balto-Slavic", R::High},
      {"de", "German", "Latin", "Indo-European", "Germanic", R::High},
      {"en", "English", "Latin", "Indo-European", "Germanic", R::High},
      {"es", "Spanish", "Latin", "Indo-European", "Italic", R::High},
      {"fa", "Persian", "Arabic", "Indo-European", "Iranian", R::High},
      {"fr", "French", "Latin", "Indo-European", "Italic", R::High},
      {"he", "Hebrew", "Hebrew", "Afro-Asiatic", "Semitic", R::Mid},
      {"hi", "Hindi", "Devanagari", "Indo-European", "Indo-Aryan", R::High},
      {"id", "Indonesian", "Latin", "Austronesian", "Malayo-Polynesian", R::Mid},
      {"it", "Italian", "Latin", "Indo-European", "Italic", R::High},
      {"ja", "Japanese", "Japanese", "Japonic", "Japanesic", R::High},
      {"km", "Khmer", "Khmer", "Austroasiatic", "Khmeric", R::Low},
      {"ko", "Korean", "Hangul", "Koreanic", "Korean", R::High},
      {"lo", "Lao", "Lao", "Tai-Kadai", "Kam-Tai", R::Low},
      {"ms", "Malay", "Latin", "Austronesian", "Malayo-Polynesian", R::Mid},
      {"my", "Burmese", "Myanmar", "Sino-Tibetan", "Burmo-Qiangic", R::Low},
      {"nl", "Dutch", "Latin", "Indo-European", "Germanic", R::High},
      {"pl", "Polish", "Latin", "Indo-European", "Balto-Slavic", R::High},
      {"pt", "Portuguese", "Latin", "Indo-European", "Italic", R::High},
      {"ru", "Russian", "Cyrillic", "Indo-European", "Balto-Slavic", R::High},
      {"th", "Thai", "Thai", "Tai-Kadai", "Kam-Tai", R::Mid},
      {"tl", "Tagalog", "Latin", "Austronesian", "Malayo-Polynesian", R::Mid},
      {"tr", "Turkish", "Latin", "Turkic", "Common Turkic", R::High},
      {"ur", "Urdu", "Arabic", "Indo-European", "Indo-Aryan", R::Mid},
      {"vi", "Vietnamese", "Latin", "Austroasiatic", "Vietic", R::High},
      {"zh", "Chinese", "Han", "Sino-Tibetan", "Sinitic", R::High},
  };
  return registry;
}

namespace {
const std::unordered_map<std::string, const LanguageEntry*>& index() {
  static const auto* map = [] {
    auto* m = new std::unordered_map<std::string, const LanguageEntry*>();
    for (const auto& e : load_registry()) (*m)[e.iso_code] = &e;
    return m;
  }();
  return *map;
}
}  // namespace

bool is_supported(const std::string& iso_code) {
  return index().count(iso_code) != 0;
}

const LanguageEntry& language(const std::string& iso_code) {
  auto it = index().find(iso_code);
  if (it == index().end())
    throw std::out_of_range("language code not in registry: " + iso_code);
  return *it->second;
}

Direction::Direction(std::string src_code, std::string tgt_code)
    : src(std::move(src_code)), tgt(std::move(tgt_code)) {
  language(src);
  language(tgt);
  if (src == tgt) throw std::invalid_argument("direction src == tgt: " + src);
}

Direction Direction::parse(const std::string& s) {
  auto dash = s.find('-');
  if (dash == std::string::npos)
    throw std::invalid_argument("direction must be 'src-tgt': " + s);
  return Direction(s.substr(0, dash), s.substr(dash + 1));
}

}  // namespace mtkit
