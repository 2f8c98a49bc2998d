#pragma once

#include <string>
#include <vector>

#include "mtkit/records.h"
#include "mtkit/tokenizer.h"

namespace mtkit {

// How per-language averages are formed. MeanOfRatios averages the
// per-sentence quotients; SumOfTokens divides total target tokens by total
// English tokens. The report labels which one was used.
enum class RatioAveraging { MeanOfRatios, SumOfTokens };

const char* to_string(RatioAveraging a);

struct LanguageRatio {
  std::string lang;
  int64_t n_sentences = 0;
  double mean_ratio = 0.0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};

struct LengthRatioReport {
  std::string tokenizer_name;
  RatioAveraging averaging = RatioAveraging::MeanOfRatios;
  std::vector<LanguageRatio> per_language;  // sorted by lang

  std::string to_json() const;
  std::string to_csv() const;  // lang,mean_ratio rows
};

// Token-count quotient of the non-English side over the English side.
// `pair` must have src_lang == "en"; throws std::invalid_argument otherwise
// and std::domain_error when the English side tokenizes to nothing.
double length_ratio(const ParallelRecord& pair, const Tokenizer& tok);

// Groups English-source pairs by target language and averages their ratios.
LengthRatioReport analyze_corpus(
    const std::vector<ParallelRecord>& pairs, const Tokenizer& tok,
    RatioAveraging averaging = RatioAveraging::MeanOfRatios);

}  // namespace mtkit
