#include "mtkit/length_ratio.h"

#include <algorithm>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

namespace mtkit {

const char* to_string(RatioAveraging a) {
  return a == RatioAveraging::MeanOfRatios ? "mean_of_ratios" : "sum_of_tokens";
}

double length_ratio(const ParallelRecord& pair, const Tokenizer& tok) {
  if (pair.src_lang != "en")
    throw std::invalid_argument("length ratio needs an English source, got " +
                                pair.src_lang);
  const auto en_len = tok.count(pair.src_text);
  if (en_len == 0)
    throw std::domain_error("English side tokenizes to zero tokens: \"" +
                            pair.src_text + "\"");
  return static_cast<double>(tok.count(pair.tgt_text)) /
         static_cast<double>(en_len);
}

LengthRatioReport analyze_corpus(const std::vector<ParallelRecord>& pairs,
                                 const Tokenizer& tok,
                                 RatioAveraging averaging) {
  struct Acc {
    int64_t n = 0;
    double sum_ratio = 0.0;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    int64_t tgt_tokens = 0;
    int64_t en_tokens = 0;
  };
  std::map<std::string, Acc> by_lang;

  for (size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    if (p.src_lang != "en")
      throw std::invalid_argument("pair " + std::to_string(i) +
                                  " is not English-source (src_lang=" +
                                  p.src_lang + ")");
    double r = length_ratio(p, tok);
    auto& acc = by_lang[p.tgt_lang];
    if (acc.n == 0) {
      acc.min_ratio = acc.max_ratio = r;
    } else {
      acc.min_ratio = std::min(acc.min_ratio, r);
      acc.max_ratio = std::max(acc.max_ratio, r);
    }
    ++acc.n;
    acc.sum_ratio += r;
    acc.tgt_tokens += tok.count(p.tgt_text);
    acc.en_tokens += tok.count(p.src_text);
  }

  LengthRatioReport report;
  report.tokenizer_name = tok.name();
  report.averaging = averaging;
  for (const auto& [lang, acc] : by_lang) {
    LanguageRatio lr;
    lr.lang = lang;
    lr.n_sentences = acc.n;
    lr.mean_ratio = averaging == RatioAveraging::MeanOfRatios
                        ? acc.sum_ratio / static_cast<double>(acc.n)
                        : static_cast<double>(acc.tgt_tokens) /
                              static_cast<double>(acc.en_tokens);
    lr.min_ratio = acc.min_ratio;
    lr.max_ratio = acc.max_ratio;
    report.per_language.push_back(std::move(lr));
  }
  return report;
}

std::string LengthRatioReport::to_json() const {
  nlohmann::json j;
  j["tokenizer"] = tokenizer_name;
  j["averaging"] = to_string(averaging);
  auto& arr = j["per_language"] = nlohmann::json::array();
  for (const auto& lr : per_language) {
    arr.push_back({{"lang", lr.lang},
                   {"n_sentences", lr.n_sentences},
                   {"mean_ratio", lr.mean_ratio},
                   {"min_ratio", lr.min_ratio},
                   {"max_ratio", lr.max_ratio}});
  }
  return j.dump(2);
}

std::string LengthRatioReport::to_csv() const {
  std::ostringstream out;
  out << "lang,mean_ratio\n";
  out.precision(12);
  for (const auto& lr : per_language) out << lr.lang << ',' << lr.mean_ratio << '\n';
  return out.str();
}

}  // namespace mtkit
