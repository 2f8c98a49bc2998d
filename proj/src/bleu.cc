#include "mtkit/bleu.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace mtkit {

namespace {

constexpr int kMaxOrder = 4;

using NgramCounts = std::map<std::vector<TokenId>, int64_t>;

NgramCounts count_ngrams(const std::vector<TokenId>& tokens, int order) {
  NgramCounts counts;
  if (static_cast<int>(tokens.size()) < order) return counts;
  for (size_t i = 0; i + order <= tokens.size(); ++i)
    ++counts[std::vector<TokenId>(tokens.begin() + i, tokens.begin() + i + order)];
  return counts;
}

}  // namespace

BleuResult corpus_bleu(const std::vector<std::vector<TokenId>>& hyps,
                       const std::vector<std::vector<TokenId>>& refs,
                       const BleuOptions& options) {
  if (hyps.size() != refs.size())
    throw std::invalid_argument("hypothesis/reference count mismatch: " +
                                std::to_string(hyps.size()) + " vs " +
                                std::to_string(refs.size()));
  if (hyps.empty()) throw std::invalid_argument("empty corpus");

  std::array<int64_t, kMaxOrder> matches{};
  std::array<int64_t, kMaxOrder> totals{};
  BleuResult result;
  result.smoothing = options.smoothing == BleuSmoothing::None ? "none" : "floor";

  for (size_t s = 0; s < hyps.size(); ++s) {
    result.hyp_len += static_cast<int64_t>(hyps[s].size());
    result.ref_len += static_cast<int64_t>(refs[s].size());
    for (int n = 1; n <= kMaxOrder; ++n) {
      auto hyp_counts = count_ngrams(hyps[s], n);
      if (hyp_counts.empty()) continue;
      auto ref_counts = count_ngrams(refs[s], n);
      for (const auto& [gram, count] : hyp_counts) {
        totals[n - 1] += count;
        auto it = ref_counts.find(gram);
        if (it != ref_counts.end())
          matches[n - 1] += std::min(count, it->second);
      }
    }
  }

  bool any_zero = false;
  double log_sum = 0.0;
  for (int n = 0; n < kMaxOrder; ++n) {
    double p = totals[n] > 0
                   ? static_cast<double>(matches[n]) / static_cast<double>(totals[n])
                   : 0.0;
    result.precisions[static_cast<size_t>(n)] = p;
    if (p <= 0.0) {
      if (options.smoothing == BleuSmoothing::Floor) p = options.floor;
      else any_zero = true;
    }
    if (p > 0.0) log_sum += std::log(p);
  }

  result.brevity_penalty =
      result.hyp_len == 0
          ? 0.0
          : std::min(1.0, std::exp(1.0 - static_cast<double>(result.ref_len) /
                                             static_cast<double>(result.hyp_len)));
  result.score = (any_zero || result.hyp_len == 0)
                     ? 0.0
                     : result.brevity_penalty * std::exp(log_sum / kMaxOrder) * 100.0;
  return result;
}

BleuResult corpus_bleu(const std::vector<std::string>& hyps,
                       const std::vector<std::string>& refs,
                       const Tokenizer& tok, const BleuOptions& options) {
  std::vector<std::vector<TokenId>> h, r;
  h.reserve(hyps.size());
  r.reserve(refs.size());
  for (const auto& s : hyps) h.push_back(tok.encode(s));
  for (const auto& s : refs) r.push_back(tok.encode(s));
  return corpus_bleu(h, r, options);
}

std::string BleuResult::to_json() const {
  nlohmann::json j;
  j["score"] = score;
  j["precisions"] = precisions;
  j["brevity_penalty"] = brevity_penalty;
  j["hyp_len"] = hyp_len;
  j["ref_len"] = ref_len;
  j["smoothing"] = smoothing;
  return j.dump(2);
}

}  // namespace mtkit
