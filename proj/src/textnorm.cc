#include "mtkit/textnorm.h"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <stdexcept>

namespace mtkit {

std::string normalize_key(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC unavailable");

  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString composed = nfc->normalize(u, status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU normalize failed");
  composed.foldCase(U_FOLD_CASE_DEFAULT);

  icu::UnicodeString collapsed;
  bool pending_space = false;
  bool seen_char = false;
  for (int32_t i = 0; i < composed.length();) {
    UChar32 cp = composed.char32At(i);
    i += U16_LENGTH(cp);
    if (u_isUWhiteSpace(cp)) {
      pending_space = seen_char;  // drop leading whitespace
      continue;
    }
    if (pending_space) {
      collapsed.append(static_cast<UChar32>(' '));
      pending_space = false;
    }
    collapsed.append(cp);
    seen_char = true;
  }

  std::string out;
  collapsed.toUTF8String(out);
  return out;
}

}  // namespace mtkit
